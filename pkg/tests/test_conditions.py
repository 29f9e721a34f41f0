"""Tests for the window-domination conditions on bucket measures."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opequiv import (
    ALEPH0,
    Aleph,
    BucketMeasure,
    CompactDiagonal,
    ConstantRay,
    DeltaMismatchError,
    FactorialSeq,
    Finite,
    GeometricRay,
    GeometricSeq,
    PowerSeq,
    ScaledIdentity,
    SparseRay,
    UnsupportedTailError,
    card_le,
    check_condition_S,
    check_condition_S_tilde,
    condition_s_outcome,
    condition_s_tilde_outcome,
    identity_measure,
    lemma_s_tilde_consistency,
    modulus_data,
)

HALF = F(1, 2)


def meas(buckets, atoms=(), delta=HALF):
    return BucketMeasure(delta=delta, buckets=buckets, atoms=atoms)


def diag_inverse():
    return modulus_data(CompactDiagonal(prefix=(), tail=PowerSeq(F(1), F(1))), HALF)


def dominated(a, b, q, k_lo, k_hi, l_max, k_min=None):
    """Brute-force check of both window inequalities at widening q."""
    for f, g in ((a, b), (b, a)):
        for k in range(k_lo if k_min is None else max(k_lo, k_min), k_hi + 1):
            for length in range(1, l_max + 1):
                left = f.window_count(k, k + length - 1)
                right = g.window_count(k - q, k + length - 1 + q)
                if not card_le(left, right):
                    return False
    return True


def assert_violation_genuine(a, b, out, k_min=None):
    """A reported violation names a window that really fails at q_used."""
    v = out.violation
    assert v is not None and not out.present
    f, g = (a, b) if v.side == "left" else (b, a)
    left = f.window_count(v.k, v.k + v.length - 1)
    right = g.window_count(v.k - out.q_used, v.k + v.length - 1 + out.q_used)
    assert not card_le(left, right)
    if k_min is not None:
        assert v.k >= k_min


# ---------------------------------------------------------------------------
# Strong form: examples


def test_identical_measures_certify_at_q1():
    for m in (
        meas({0: Finite(2), 3: Finite(1)}),
        meas({1: Finite(2)}, atoms=(ConstantRay(2, Finite(3)),)),
        meas({}, atoms=(SparseRay(1),)),
        diag_inverse(),
        modulus_data(CompactDiagonal(prefix=(), tail=FactorialSeq()), HALF),
        modulus_data(CompactDiagonal(prefix=(), tail=GeometricSeq(F(1), F(1, 3))), HALF),
        meas({}, atoms=(GeometricRay(2, 3),)),
        meas({}, atoms=(ConstantRay(0, ALEPH0),)),
    ):
        out = condition_s_outcome(m, m, q_max=12)
        assert out.present and out.q_used == 1 and out.delta_prime == m.delta


def test_single_values_three_buckets_apart():
    # Values 3 (bucket -2) and 1/3 (bucket 1): reach 3 is needed and enough.
    out = condition_s_outcome(meas({-2: Finite(1)}), meas({1: Finite(1)}))
    assert out.present and out.q_used == 3 and out.delta_prime == F(1, 8)
    assert check_condition_S(meas({-2: Finite(1)}), meas({1: Finite(1)})) == F(1, 8)


def test_offset_constant_rays():
    a = meas({}, atoms=(ConstantRay(0, Finite(1)),))
    b = meas({}, atoms=(ConstantRay(5, Finite(1)),))
    out = condition_s_outcome(a, b)
    assert out.present and out.q_used == 5 and out.delta_prime == F(1, 32)


def test_infinite_vs_finite_identity_fails():
    out = condition_s_outcome(
        identity_measure(HALF, ALEPH0), identity_measure(HALF, Finite(5)), q_max=12
    )
    assert out.violation is not None and out.violation.side == "left"
    assert out.violation.k == -1
    assert_violation_genuine(
        identity_measure(HALF, ALEPH0), identity_measure(HALF, Finite(5)), out
    )


def test_aleph_levels_are_not_interchangeable():
    a = identity_measure(HALF, ALEPH0)
    b = identity_measure(HALF, Aleph(1))
    out = condition_s_outcome(a, b, q_max=12)
    # The aleph-1 window on the right cannot be absorbed by aleph-0 mass.
    assert out.violation is not None and out.violation.side == "right"
    assert_violation_genuine(a, b, out)


def test_growth_rate_mismatch_is_refuted():
    g2 = meas({}, atoms=(GeometricRay(0, 2),))
    g3 = meas({}, atoms=(GeometricRay(0, 3),))
    out = condition_s_outcome(g2, g3, q_max=12)
    assert out.violation is not None and out.violation.side == "right"
    assert_violation_genuine(g2, g3, out)

    dense = diag_inverse()  # ~2^k per window
    sparse = meas({}, atoms=(SparseRay(0),))  # ~l marks per window
    out = condition_s_outcome(dense, sparse, q_max=12)
    assert out.violation is not None and out.violation.side == "left"
    assert_violation_genuine(dense, sparse, out)


def test_geometric_value_tails_with_different_ratios():
    gh = modulus_data(CompactDiagonal(prefix=(), tail=GeometricSeq(F(1), HALF)), HALF)
    gt = modulus_data(CompactDiagonal(prefix=(), tail=GeometricSeq(F(1), F(1, 3))), HALF)
    out = condition_s_outcome(gh, gt, q_max=12)
    assert out.violation is not None and out.violation.side == "left"
    assert_violation_genuine(gh, gt, out)


def test_uncertified_tail_combinations_raise():
    # Distinct atom families with compatible densities have no certificate:
    # the checker must refuse rather than guess.
    with pytest.raises(UnsupportedTailError):
        condition_s_outcome(meas({}, atoms=(GeometricRay(0, 2),)), diag_inverse(), q_max=12)
    gh = modulus_data(CompactDiagonal(prefix=(), tail=GeometricSeq(F(1), HALF)), HALF)
    with pytest.raises(UnsupportedTailError):
        condition_s_outcome(gh, meas({}, atoms=(ConstantRay(0, Finite(1)),)), q_max=12)


def test_offset_sparse_rules_eventually_separate():
    # Gaps between factorial marks grow without bound, so no fixed widening
    # bridges an offset pair; the checker locates a deep witness window.
    sp0 = meas({}, atoms=(SparseRay(0),))
    sp3 = meas({}, atoms=(SparseRay(3),))
    out = condition_s_outcome(sp0, sp3, q_max=12)
    assert out.violation is not None and out.violation.side == "left"
    assert_violation_genuine(sp0, sp3, out)


def test_delta_mismatch_rejected():
    with pytest.raises(DeltaMismatchError):
        condition_s_outcome(meas({}), meas({}, delta=F(1, 3)))


# ---------------------------------------------------------------------------
# Cutoff form: examples


def test_cutoff_examples():
    diag = diag_inverse()
    out = condition_s_tilde_outcome(diag, diag)
    assert (out.delta_prime, out.n_cutoff, out.q_used) == (HALF, 1, 1)

    # Identities of any value: no mass at buckets k >= 1, vacuously present.
    one = identity_measure(HALF, ALEPH0)
    two = modulus_data(ScaledIdentity(F(2), ALEPH0), HALF)
    out = condition_s_tilde_outcome(one, two)
    assert (out.delta_prime, out.n_cutoff, out.q_used) == (HALF, 1, 1)
    assert check_condition_S_tilde(one, two) == (HALF, 1)


def test_cutoff_cannot_hide_unbounded_small_spectrum():
    # diag(1/n) keeps mass in every deep window; an identity has none there.
    diag, one = diag_inverse(), identity_measure(HALF, ALEPH0)
    out = condition_s_tilde_outcome(diag, one, q_max=12, n_max=12)
    assert out.violation is not None and out.violation.side == "left"
    assert_violation_genuine(diag, one, out, k_min=1)
    out = condition_s_tilde_outcome(one, diag, q_max=12, n_max=12)
    assert out.violation is not None and out.violation.side == "right"
    assert check_condition_S_tilde(diag, one, q_max=12, n_max=12) is None


# ---------------------------------------------------------------------------
# Randomized soundness on finite measures


finite_measures = st.dictionaries(
    st.integers(-3, 5), st.integers(0, 5), max_size=5
).map(lambda d: meas({j: Finite(c) for j, c in d.items()}))


@given(finite_measures, finite_measures)
@settings(max_examples=150)
def test_strong_form_on_finite_measures(a, b):
    # For finitely supported measures the strong condition is equivalent to
    # equal totals: a wide-enough window sees everything on both sides.
    out = condition_s_outcome(a, b)
    assert out.present == (a.total_mass() == b.total_mass())
    idx = list(a.buckets) + list(b.buckets) + [0]
    lo, hi, span = min(idx) - 1, max(idx) + 1, max(idx) - min(idx) + 3
    if out.present:
        assert out.delta_prime == HALF**out.q_used
        assert dominated(a, b, out.q_used, lo, hi, span)
        # Minimality of the certified widening.
        assert out.q_used == 1 or not dominated(a, b, out.q_used - 1, lo, hi, span)
    else:
        assert_violation_genuine(a, b, out)


@given(finite_measures, finite_measures)
@settings(max_examples=150)
def test_cutoff_form_on_finite_measures(a, b):
    # With a cutoff available, finitely supported measures always comply:
    # pushing N past both supports leaves nothing to dominate.
    out = condition_s_tilde_outcome(a, b)
    assert out.present and out.q_used == 1
    idx = list(a.buckets) + list(b.buckets) + [0]
    lo, hi, span = min(idx) - 1, max(idx) + 1, max(idx) - min(idx) + 3
    assert dominated(a, b, 1, lo, hi, span, k_min=out.n_cutoff)
    # Minimality of the cutoff at the certified widening.
    if out.n_cutoff > 1:
        assert not dominated(a, b, 1, lo, hi, span, k_min=out.n_cutoff - 1)


@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(0, 2))
@settings(max_examples=80)
def test_aleph_point_distance_sets_the_reach(ja, jb, level):
    a = meas({ja: Aleph(level)})
    b = meas({jb: Aleph(level)})
    out = condition_s_outcome(a, b)
    assert out.present
    assert out.q_used == max(1, abs(ja - jb))


# ---------------------------------------------------------------------------
# Consistency between the two forms under identity augmentation


def test_augmentation_consistency_examples():
    diag = diag_inverse()
    one = identity_measure(HALF, ALEPH0)
    two = meas({-2: ALEPH0})
    assert lemma_s_tilde_consistency(diag, diag, (ALEPH0, ALEPH0))
    assert lemma_s_tilde_consistency(one, two, (ALEPH0, ALEPH0))
    # Negative case: both forms must refuse together.
    assert lemma_s_tilde_consistency(diag, one, (ALEPH0, ALEPH0))
    assert lemma_s_tilde_consistency(
        meas({0: Finite(2)}), meas({1: Finite(2)}), (Finite(3), Finite(3))
    )
