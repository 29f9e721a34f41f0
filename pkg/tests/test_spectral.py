"""Tests for the spectral data model: atoms, measures, reduction, membership."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opequiv import (
    ALEPH0,
    Aleph,
    BoundaryAmbiguityError,
    BucketMeasure,
    Buckets,
    CoefficientSeq,
    CompactDiagonal,
    ConstantRay,
    DeltaMismatchError,
    FactorialSeq,
    Finite,
    FiniteMatrix,
    GeometricRay,
    GeometricSeq,
    PowerSeq,
    ScaledIdentity,
    SeqRay,
    SeqSpan,
    SparseRay,
    SpecError,
    UnsupportedTailError,
    ZERO,
    ZeroTail,
    bucket_index,
    card_add,
    direct_sum,
    flatten_values,
    identity_measure,
    kernel_condition,
    merge_measures,
    modulus_data,
    range_membership,
    truncate_inventory,
)

HALF = F(1, 2)


def meas(buckets, atoms=(), kernel=ZERO, cokernel=ZERO, delta=HALF):
    return BucketMeasure(
        delta=delta, buckets=buckets, atoms=atoms, kernel_dim=kernel, cokernel_dim=cokernel
    )


# ---------------------------------------------------------------------------
# Tail atoms


def test_constant_ray_counts():
    ray = ConstantRay(start=3, count=Finite(2))
    assert ray.count_at(2, HALF) == ZERO
    assert ray.count_at(3, HALF) == Finite(2)
    assert ray.count_at(100, HALF) == Finite(2)
    # Window 1..5 overlaps at 3,4,5.
    assert ray.window_count(1, 5, HALF) == Finite(6)
    assert ray.window_count(4, 3, HALF) == ZERO
    # Finitely many per bucket but infinitely many buckets.
    assert ray.total() == ALEPH0
    assert ConstantRay(0, ALEPH0).total() == ALEPH0


def test_constant_ray_rejects_zero_count():
    with pytest.raises(SpecError):
        ConstantRay(start=0, count=ZERO)


def test_geometric_ray_counts():
    ray = GeometricRay(start=1, base=2)
    assert ray.count_at(0, HALF) == ZERO
    assert ray.count_at(1, HALF) == Finite(2)
    assert ray.count_at(5, HALF) == Finite(32)
    # Sum of 2^j for j = 1..4 is 30.
    assert ray.window_count(1, 4, HALF) == Finite(30)
    assert ray.window_count(0, 4, HALF) == Finite(30)
    assert ray.total() == ALEPH0


def test_geometric_ray_validation():
    with pytest.raises(SpecError):
        GeometricRay(start=-1, base=2)
    with pytest.raises(SpecError):
        GeometricRay(start=0, base=1)


def test_sparse_ray_window_matches_pointwise():
    ray = SparseRay(start=0)
    for k in range(0, 12):
        total = sum(ray.count_at(j, HALF).n for j in range(k, 20))
        assert ray.window_count(k, 19, HALF) == Finite(total)
    assert ray.total() == ALEPH0
    assert ray.first_bucket(HALF) == 0  # log2(1!) = 0


def test_seq_ray_power_law_counts():
    # Values 1/n for n >= 1: one value in bucket -1 (n=1), one in bucket 0
    # (n=2), then 2^j values in bucket j for j >= 1.
    ray = SeqRay(SeqSpan(PowerSeq(F(1), F(1)), 1, 1))
    assert ray.count_at(-1, HALF) == Finite(1)
    assert ray.count_at(0, HALF) == Finite(1)
    for j in range(1, 7):
        assert ray.count_at(j, HALF) == Finite(2**j)
    assert ray.window_count(1, 3, HALF) == Finite(2 + 4 + 8)
    assert ray.first_bucket(HALF) == -1


def test_seq_ray_multiplicity_scales_counts():
    single = SeqRay(SeqSpan(PowerSeq(F(1), F(1)), 1, 1))
    triple = SeqRay(SeqSpan(PowerSeq(F(1), F(1)), 1, 3))
    for j in range(-1, 8):
        assert triple.count_at(j, HALF) == Finite(3 * single.count_at(j, HALF).n)


# ---------------------------------------------------------------------------
# Bucket measures


def test_measure_drops_zero_buckets_and_coerces_ints():
    m = meas({0: 2, 3: ZERO, 5: Finite(0), 7: Finite(1)})
    assert set(m.buckets) == {0, 7}
    assert m.buckets[0] == Finite(2)


def test_measure_rejects_non_integer_bucket():
    with pytest.raises(SpecError):
        meas({"0": Finite(1)})


def test_count_at_adds_atoms_to_explicit():
    m = meas({2: Finite(5)}, atoms=(ConstantRay(2, Finite(1)),))
    assert m.count_at(1) == ZERO
    assert m.count_at(2) == Finite(6)
    assert m.count_at(3) == Finite(1)


def test_window_count_sums_pointwise():
    m = meas(
        {0: Finite(1), 2: ALEPH0},
        atoms=(SparseRay(0), ConstantRay(5, Finite(2))),
    )
    for k in range(-2, 8):
        for h in range(k - 1, 10):
            expected = ZERO
            for j in range(k, h + 1):
                expected = card_add(expected, m.count_at(j))
            assert m.window_count(k, h) == expected


def test_finite_count_at_rejects_infinite():
    m = meas({1: ALEPH0})
    assert m.finite_count_at(0) == 0
    with pytest.raises(SpecError):
        m.finite_count_at(1)


def test_support_and_classification():
    empty = meas({})
    assert empty.support_min() is None
    assert empty.bounded_support_max() is None
    assert empty.total_mass() == ZERO
    assert empty.is_compact() and empty.has_closed_range()

    finite = meas({-1: Finite(2), 3: Finite(1)})
    assert finite.support_min() == -1
    assert finite.bounded_support_max() == 3
    assert finite.total_mass() == Finite(3)
    assert finite.is_compact() and finite.has_closed_range()

    tailed = meas({0: Finite(1)}, atoms=(ConstantRay(4, Finite(1)),))
    assert tailed.support_min() == 0
    assert tailed.bounded_support_max() is None  # unbounded support
    assert tailed.total_mass() == ALEPH0
    assert tailed.is_compact() and not tailed.has_closed_range()

    fat = meas({-1: ALEPH0})
    assert fat.aleph_points() == [(-1, 0)]
    assert not fat.is_compact() and fat.has_closed_range()

    fat_ray = meas({}, atoms=(ConstantRay(0, Aleph(1)),))
    assert fat_ray.aleph_rays() == [(0, 1)]
    assert fat_ray.is_noncompact() and not fat_ray.has_closed_range()


def test_domain_and_codomain_dims():
    m = meas({0: Finite(3)}, kernel=Finite(2), cokernel=ALEPH0)
    assert m.domain_dim() == Finite(5)
    assert m.codomain_dim() == ALEPH0


def test_measure_json_shapes():
    m = meas(
        {-1: ALEPH0, 2: Finite(3)},
        atoms=(
            ConstantRay(0, Finite(1)),
            GeometricRay(1, 2),
            SparseRay(0),
            SeqRay(SeqSpan(GeometricSeq(F(1), F(1, 3)), 2, 2)),
        ),
        kernel=Finite(1),
    )
    out = m.to_json()
    assert out["delta"] == "1/2"
    assert out["buckets"] == {"-1": "aleph0", "2": 3}
    assert out["kernel"] == 1 and out["cokernel"] == 0
    kinds = [t["kind"] for t in out["tails"]]
    assert kinds == ["constant", "geometric_count", "sparse_factorial", "sequence"]
    seq = out["tails"][-1]
    assert seq["model"] == {"kind": "geometric", "c": "1", "r": "1/3"}
    assert seq["model_start"] == 2 and seq["multiplicity"] == 2
    # Atom-free measures serialize without a tails key.
    assert "tails" not in meas({0: Finite(1)}).to_json()


# ---------------------------------------------------------------------------
# Merging and the identity measure


def test_merge_requires_same_delta():
    with pytest.raises(DeltaMismatchError):
        merge_measures(meas({}), meas({}, delta=F(1, 3)))


@st.composite
def measures(draw):
    buckets = draw(
        st.dictionaries(
            st.integers(-3, 6),
            st.one_of(
                st.integers(0, 9).map(Finite),
                st.integers(0, 2).map(Aleph),
            ),
            max_size=4,
        )
    )
    atoms = []
    if draw(st.booleans()):
        atoms.append(ConstantRay(draw(st.integers(-2, 4)), Finite(draw(st.integers(1, 3)))))
    if draw(st.booleans()):
        atoms.append(SparseRay(draw(st.integers(0, 3))))
    return meas(
        buckets,
        atoms=tuple(atoms),
        kernel=Finite(draw(st.integers(0, 3))),
        cokernel=Finite(draw(st.integers(0, 3))),
    )


@given(measures(), measures(), st.integers(-4, 10))
@settings(max_examples=120)
def test_merge_is_pointwise_cardinal_sum(a, b, j):
    merged = merge_measures(a, b)
    assert merged.count_at(j) == card_add(a.count_at(j), b.count_at(j))
    assert merged.total_mass() == card_add(a.total_mass(), b.total_mass())
    assert merged.kernel_dim == card_add(a.kernel_dim, b.kernel_dim)
    assert merged.cokernel_dim == card_add(a.cokernel_dim, b.cokernel_dim)


def test_identity_measure():
    assert identity_measure(HALF, ZERO).buckets == {}
    m = identity_measure(HALF, ALEPH0)
    assert m.buckets == {-1: ALEPH0}
    assert identity_measure(HALF, Finite(4)).count_at(-1) == Finite(4)


# ---------------------------------------------------------------------------
# Operator specifications and their validation


def test_matrix_validation():
    with pytest.raises(SpecError):
        FiniteMatrix(rows=())
    with pytest.raises(SpecError):
        FiniteMatrix(rows=((1, 2), (3,)))
    m = FiniteMatrix(rows=((1, 2, 3), (4, 5, 6)))
    assert m.n_rows == 2 and m.n_cols == 3


def test_compact_diagonal_validation():
    with pytest.raises(SpecError):
        CompactDiagonal(prefix=(F(1), F(0)))
    with pytest.raises(SpecError):
        CompactDiagonal(prefix=(F(1, 4), F(1, 2)))  # increasing
    with pytest.raises(SpecError):
        # First tail term is 1, which exceeds the last prefix entry 1/4.
        CompactDiagonal(prefix=(F(1, 4),), tail=PowerSeq(F(1), F(1)))
    CompactDiagonal(prefix=(F(1),), tail=PowerSeq(F(1), F(1)))  # ok: 1 >= 1


def test_scaled_identity_validation():
    with pytest.raises(SpecError):
        ScaledIdentity(value=F(0), dim=Finite(1))
    ScaledIdentity(value=F(3), dim=ALEPH0)


# ---------------------------------------------------------------------------
# Reduction to modulus data


def test_modulus_data_diagonal_example():
    spec = CompactDiagonal(prefix=(HALF, F(1, 4), F(1, 8)))
    m = modulus_data(spec, HALF)
    assert m.buckets == {0: Finite(1), 1: Finite(1), 2: Finite(1)}
    assert m.kernel_dim == ZERO and m.cokernel_dim == ZERO


def test_modulus_data_diagonal_tail_atom():
    spec = CompactDiagonal(prefix=(), tail=PowerSeq(F(1), F(1)))
    m = modulus_data(spec, HALF)
    assert len(m.atoms) == 1 and isinstance(m.atoms[0], SeqRay)
    for j in range(1, 6):
        assert m.count_at(j) == Finite(2**j)


def test_modulus_data_square_matrix_with_kernel():
    m = modulus_data(FiniteMatrix(rows=((3, 0), (0, 0))), HALF)
    assert m.buckets == {-2: Finite(1)}  # 3 lies in [2, 4)
    assert m.kernel_dim == Finite(1) and m.cokernel_dim == Finite(1)


def test_modulus_data_rectangular_matrix():
    m = modulus_data(FiniteMatrix(rows=((1, 0, 0), (0, 2, 0))), HALF)
    assert m.buckets == {-1: Finite(1), -2: Finite(1)}
    assert m.kernel_dim == Finite(1)  # 3 columns, rank 2
    assert m.cokernel_dim == ZERO


def test_modulus_data_complex_matrix():
    m = modulus_data(FiniteMatrix(rows=((0, 1j), (1, 0))), HALF)
    assert m.buckets == {-1: Finite(2)}
    assert m.kernel_dim == ZERO and m.cokernel_dim == ZERO


def test_modulus_data_boundary_ambiguity():
    # A singular value within svd_tol of the bucket edge 1/2 (but not equal to
    # it) cannot be bucketed reliably.
    with pytest.raises(BoundaryAmbiguityError):
        modulus_data(FiniteMatrix(rows=((0.5 + 1e-12,),)), HALF)
    # Exactly on the edge is fine: 1/2 belongs to bucket 0 by the half-open
    # convention, and exact equality is not ambiguous.
    assert modulus_data(FiniteMatrix(rows=((0.5,),)), HALF).buckets == {0: Finite(1)}


def test_modulus_data_scaled_identity():
    assert modulus_data(ScaledIdentity(F(1), ALEPH0), HALF).buckets == {-1: ALEPH0}
    assert modulus_data(ScaledIdentity(F(3), Finite(2)), HALF).buckets == {-2: Finite(2)}
    assert modulus_data(ScaledIdentity(F(1), ZERO), HALF).buckets == {}


def test_modulus_data_buckets_passthrough_checks_delta():
    m = meas({0: Finite(1)})
    assert modulus_data(Buckets(m), HALF) is m
    with pytest.raises(DeltaMismatchError):
        modulus_data(Buckets(m), F(1, 3))


@given(st.lists(st.fractions(min_value=F(1, 64), max_value=F(8)), min_size=1, max_size=8))
@settings(max_examples=80)
def test_modulus_data_matches_bucketed_values(vals):
    # A diagonal's measure is exactly the histogram of bucket_index over its
    # values (floats stay far from edges here by keeping denominators small).
    vals = sorted(vals, reverse=True)
    m = modulus_data(CompactDiagonal(prefix=tuple(vals)), HALF)
    expected = {}
    for v in vals:
        j = bucket_index(v, HALF)
        expected[j] = expected.get(j, 0) + 1
    assert {j: c.n for j, c in m.buckets.items()} == expected


@given(measures(), measures())
@settings(max_examples=60)
def test_direct_sum_measure_is_merge(a, b):
    sum_measure = modulus_data(direct_sum(Buckets(a), Buckets(b)), HALF)
    merged = merge_measures(a, b)
    assert sum_measure.buckets == merged.buckets
    assert sum_measure.total_mass() == merged.total_mass()


def test_kernel_condition():
    a = FiniteMatrix(rows=((3, 0), (0, 0)))
    b = FiniteMatrix(rows=((0, 1), (0, 0)))
    assert kernel_condition(a, b)  # both have kernel 1, cokernel 1
    assert not kernel_condition(a, FiniteMatrix(rows=((1, 0), (0, 1))))
    # Rectangular shapes compare both defects independently.
    tall = FiniteMatrix(rows=((1, 0), (0, 1), (0, 0)))  # cokernel 1
    wide = FiniteMatrix(rows=((1, 0, 0), (0, 1, 0)))  # kernel 1
    assert not kernel_condition(tall, wide)
    sick = CompactDiagonal(prefix=(F(1),), kernel_dim=ALEPH0, cokernel_dim=ALEPH0)
    assert kernel_condition(sick, sick)
    assert not kernel_condition(sick, CompactDiagonal(prefix=(F(1),)))


# ---------------------------------------------------------------------------
# Range membership


def diag_inverse_integers():
    """Measure of diag(1, 1/2, 1/3, ...): dense in every bucket j >= -1."""
    return modulus_data(CompactDiagonal(prefix=(), tail=PowerSeq(F(1), F(1))), HALF)


def test_range_membership_rejects_off_spectrum_components():
    m = meas({2: Finite(1)})
    with pytest.raises(SpecError):
        range_membership(m, CoefficientSeq(explicit={3: F(1)}))
    assert range_membership(m, CoefficientSeq(explicit={2: F(5)}))
    # Zero entries are dropped and never obstruct.
    assert range_membership(m, CoefficientSeq(explicit={3: F(0), 2: F(1)}))


def test_range_membership_finite_support_always_in_range():
    m = diag_inverse_integers()
    x = CoefficientSeq(explicit={-1: F(7), 0: F(1), 5: F(1, 32)})
    assert range_membership(m, x)


def test_range_membership_geometric_tail_threshold():
    m = diag_inverse_integers()
    assert range_membership(m, CoefficientSeq({}, tail=GeometricSeq(F(1), F(1, 4)), tail_from=0))
    assert not range_membership(m, CoefficientSeq({}, tail=GeometricSeq(F(1), HALF), tail_from=0))
    assert not range_membership(m, CoefficientSeq({}, tail=GeometricSeq(F(1), F(3, 4)), tail_from=0))


def test_range_membership_power_and_factorial_tails():
    m = diag_inverse_integers()
    assert not range_membership(m, CoefficientSeq({}, tail=PowerSeq(F(1), F(2)), tail_from=0))
    assert range_membership(m, CoefficientSeq({}, tail=FactorialSeq(), tail_from=0))


def test_range_membership_tail_needs_dense_spectrum():
    # Closed-range measures have no spectrum beyond a point: an infinite tail
    # of components has nowhere to sit.
    with pytest.raises(SpecError):
        range_membership(
            meas({0: Finite(1)}), CoefficientSeq({}, tail=FactorialSeq(), tail_from=0)
        )
    # Sparse spectra (factorial marks) leave gaps inside every horizon.
    with pytest.raises(SpecError):
        range_membership(
            meas({}, atoms=(SparseRay(0),)),
            CoefficientSeq({}, tail=GeometricSeq(F(1), F(1, 4)), tail_from=0),
        )


def test_range_membership_constant_ray_is_dense():
    m = meas({}, atoms=(ConstantRay(0, Finite(1)),))
    assert range_membership(m, CoefficientSeq({}, tail=GeometricSeq(F(1), F(1, 3)), tail_from=0))
    assert not range_membership(m, CoefficientSeq({}, tail=PowerSeq(F(1), F(3)), tail_from=0))


def test_coefficient_seq_validation():
    with pytest.raises(SpecError):
        CoefficientSeq(explicit={0: F(-1)})
    assert CoefficientSeq(explicit={}, tail=ZeroTail()).tail is None


# ---------------------------------------------------------------------------
# Value inventories


def test_flatten_values_collects_and_sorts():
    spec = direct_sum(
        CompactDiagonal(prefix=(F(1, 4),)),
        ScaledIdentity(F(3), Finite(2)),
    )
    inv = flatten_values(spec)
    assert inv.values == (F(3), F(3), F(1, 4))
    assert inv.spans == () and inv.aleph_values == ()
    assert inv.is_compact_data()


def test_flatten_values_merges_equal_tails_into_multiplicity():
    one = CompactDiagonal(prefix=(), tail=PowerSeq(F(1), F(1)))
    inv = flatten_values(direct_sum(one, one))
    assert len(inv.spans) == 1
    assert inv.spans[0].mult == 2 and inv.spans[0].start == 1


def test_flatten_values_records_infinite_identities():
    inv = flatten_values(ScaledIdentity(F(1, 2), ALEPH0))
    assert inv.aleph_values == ((F(1, 2), 0),)
    assert not inv.is_compact_data()


def test_flatten_values_accumulates_defects():
    spec = direct_sum(
        FiniteMatrix(rows=((0, 0), (0, 1))),
        CompactDiagonal(prefix=(F(1),), kernel_dim=Finite(2)),
    )
    inv = flatten_values(spec)
    assert inv.kernel_dim == Finite(3) and inv.cokernel_dim == Finite(1)
    assert inv.values == (F(1), F(1))


def test_flatten_values_rejects_bucket_data():
    with pytest.raises(UnsupportedTailError):
        flatten_values(Buckets(meas({0: Finite(1)})))


def test_truncate_inventory():
    inv = flatten_values(
        direct_sum(
            CompactDiagonal(prefix=(F(1), HALF, F(1, 4), F(1, 8)), tail=ZeroTail()),
            CompactDiagonal(prefix=(), tail=PowerSeq(F(1), F(1))),
        )
    )
    cut = truncate_inventory(inv, HALF, 2)
    # Strictly below 1/4: only the 1/8 survives from the explicit values.
    assert cut.values == (F(1, 8),)
    # 1/n >= 1/4 for n = 1..4, so the span restarts at n = 5.
    assert cut.spans[0].start == 5 and cut.spans[0].mult == 1
    assert cut.aleph_values == ()


def test_truncate_inventory_aleph_handling():
    shallow = flatten_values(ScaledIdentity(F(1), ALEPH0))
    cut = truncate_inventory(shallow, HALF, 2)
    assert cut.aleph_values == ()  # the value 1 sits above the bar and is dropped
    deep = flatten_values(ScaledIdentity(F(1, 8), ALEPH0))
    with pytest.raises(SpecError):
        truncate_inventory(deep, HALF, 2)
