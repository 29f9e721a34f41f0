"""Window-domination conditions on bucket measures.

The core question: for a widening exponent q, does every window of consecutive
buckets of ``a`` carry no more spectral dimension than the same window of
``b`` widened by q buckets on each side (and symmetrically)? Windows range
over all k (the strong form) or only k >= N (the cutoff form, searched
jointly over N).

Infinite bucket counts are resolved by cardinal absorption: a window
containing an infinite bucket of ``a`` is dominated iff ``b`` has an equal or
higher infinite level within reach, and any window whose widening touches an
infinite bucket of ``b`` is trivially dominated. What remains is
integer-valued and decided exactly: finite stretches by a streaming scan over
prefix sums, unbounded tails by closed-form certificates on the symbolic tail
atoms, with failures located as concrete re-checkable windows. Tail
combinations with no certificate and no located violation raise
UnsupportedTailError rather than guessing either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .cardinal import Aleph, Finite, ZERO, card_add
from .errors import DeltaMismatchError, UnsupportedTailError
from .spectral import (
    BucketMeasure,
    ConstantRay,
    GeometricRay,
    SeqRay,
    SparseRay,
    identity_measure,
    merge_measures,
)
from .tails import (
    FactorialSeq,
    GeometricSeq,
    PowerSeq,
    SeqSpan,
    bucket_index,
    factorial,
    pow_delta,
    ratio_root_lower,
    sparse_rule_count,
    term_value,
)

_SCAN_SLACK = 160  # extra buckets scanned past the last structural feature


@dataclass(frozen=True)
class WindowViolation:
    """A concrete failing window: the ``side`` whose window [k, k+length-1]
    exceeds the other side's widened window."""

    side: str  # "left" or "right"
    k: int
    length: int


@dataclass(frozen=True)
class ConditionOutcome:
    delta_prime: Optional[Fraction] = None
    n_cutoff: Optional[int] = None
    q_used: Optional[int] = None
    violation: Optional[WindowViolation] = None
    unsupported: Optional[str] = None

    @property
    def present(self) -> bool:
        return self.delta_prime is not None


# ---------------------------------------------------------------------------
# Finite counting with memoization (one _Side is reused across the whole
# (q, N) search, so each distinct bucket is counted once)


class _Side:
    """One measure, split into finite data and infinite features."""

    def __init__(self, m: BucketMeasure):
        self.measure = m
        self.delta = m.delta
        self.finite_explicit = {
            j: c.n for j, c in m.buckets.items() if not isinstance(c, Aleph)
        }
        self.aleph_points = m.aleph_points()
        self.aleph_rays = m.aleph_rays()
        self.aleph_ray_start = (
            min(s for s, _ in self.aleph_rays) if self.aleph_rays else None
        )
        self.finite_atoms = tuple(
            a
            for a in m.atoms
            if not (isinstance(a, ConstantRay) and isinstance(a.count, Aleph))
        )
        self._cum_memo: dict[int, int] = {}

    def finite_count_at(self, j: int) -> int:
        return self.finite_cum(j) - self.finite_cum(j - 1)

    def finite_cum(self, h: int) -> int:
        got = self._cum_memo.get(h)
        if got is not None:
            return got
        total = sum(c for j, c in self.finite_explicit.items() if j <= h)
        for a in self.finite_atoms:
            total += _atom_cum(a, h, self.delta)
        self._cum_memo[h] = total
        return total

    def explicit_total(self) -> int:
        return sum(self.finite_explicit.values())

    def aleph_at_or_reaching(self, lo: int, hi: int) -> Optional[int]:
        """Highest infinite level present in buckets [lo, hi], if any."""
        best = None
        for j, lev in self.aleph_points:
            if lo <= j <= hi and (best is None or lev > best):
                best = lev
        for s, lev in self.aleph_rays:
            if s <= hi and (best is None or lev > best):
                best = lev
        return best

    def structural_indices(self) -> list[int]:
        out = list(self.finite_explicit)
        out.extend(j for j, _ in self.aleph_points)
        out.extend(a.first_bucket(self.delta) for a in self.finite_atoms)
        out.extend(s for s, _ in self.aleph_rays)
        return out


def _atom_cum(atom, h: int, delta: Fraction) -> int:
    """Count contributed by a finite-count atom to buckets <= h."""
    if isinstance(atom, ConstantRay):
        return max(0, h - atom.start + 1) * atom.count.n
    if isinstance(atom, GeometricRay):
        if h < atom.start:
            return 0
        b = atom.base
        return (b ** (h + 1) - b**atom.start) // (b - 1)
    if isinstance(atom, SparseRay):
        return sparse_rule_count(delta, atom.start, h)
    if isinstance(atom, SeqRay):
        return atom.span.cum_to_bucket(delta, h)
    raise TypeError(f"unknown atom {atom!r}")


# ---------------------------------------------------------------------------
# Phase 1: infinite-bucket coverage


def _aleph_coverage(a: _Side, b: _Side, q: int, k_min: Optional[int]):
    """Check every single-bucket window of ``a`` carrying infinite dimension.

    These are necessary instances, and they settle every window that contains
    an infinite bucket of ``a``: cardinal sums absorb all finite content, and
    the highest-level position's own [j, j] window is checked here.
    """

    def in_scope(j: int) -> bool:
        return k_min is None or j >= k_min

    def covered(j: int, level: int) -> bool:
        got = b.aleph_at_or_reaching(j - q, j + q)
        return got is not None and got >= level

    for j, lev in a.aleph_points:
        if in_scope(j) and not covered(j, lev):
            return (j, 1)
    for s, lev in a.aleph_rays:
        start = s if k_min is None else max(s, k_min)
        ray_starts = [bs for bs, bl in b.aleph_rays if bl >= lev]
        if not ray_starts:
            # Only finitely many positions of b can cover; pick one beyond.
            beyond = [bj + q + 1 for bj, bl in b.aleph_points if bl >= lev]
            return (max([start] + beyond), 1)
        for j in range(start, min(ray_starts) - q):
            if not covered(j, lev):
                return (j, 1)
    return None


# ---------------------------------------------------------------------------
# Finite-segment streaming scan


def _scan_segment(
    a: _Side, b: _Side, q: int, seg_lo: int, seg_hi: int, k_min: Optional[int]
) -> tuple[Optional[tuple[int, int]], int]:
    """Exact check of every window [k, h] inside [seg_lo, seg_hi].

    A violation exists iff U(h) > min_{m in [k_lo-1, h-1]} V(m) where
    U(h) = Ca(h) - Cb(h+q) and V(m) = Ca(m) - Cb(m-q); the segment
    construction keeps every consulted range clear of infinite buckets.
    Returns (first violation or None, final min of V over the segment).
    """
    k_lo = seg_lo if k_min is None else max(seg_lo, k_min)
    if k_lo > seg_hi:
        return None, 0
    ca = a.finite_cum(k_lo - 1)
    cb_hi = b.finite_cum(k_lo - 1 + q)
    cb_lo = b.finite_cum(k_lo - 1 - q)
    v_min = ca - cb_lo
    v_argmin = k_lo - 1
    for h in range(k_lo, seg_hi + 1):
        ca += a.finite_count_at(h)
        cb_hi += b.finite_count_at(h + q)
        if ca - cb_hi > v_min:
            k = v_argmin + 1
            return (k, h - k + 1), v_min
        cb_lo += b.finite_count_at(h - q)
        v = ca - cb_lo
        if v < v_min:
            v_min = v
            v_argmin = h
    return None, v_min


# ---------------------------------------------------------------------------
# Eventual-domination bounds for single sequence-span tails
#
# _span_dom(x, y, q, delta, h_from, offset) certifies
#     y.count_ge(delta^(h+q+1)) - x.count_ge(delta^(h+1)) >= offset
# for EVERY h >= h_from, by sandwiching the exact floor counts between
# continuous envelopes whose gap is nondecreasing in h. All coefficients are
# exact rationals; count evaluations are exact integers.


def _floor_log_frac(value: Fraction, base: Fraction) -> int:
    """floor(log_base(value)) for value > 0, base > 1, exactly."""
    # Seed from integer logs (float(value) may under- or overflow), then
    # correct exactly.
    lv = math.log2(value.numerator) - math.log2(value.denominator)
    lb = max(math.log2(base.numerator) - math.log2(base.denominator), 1e-12)
    d = int(math.floor(lv / lb))
    while base**d > value:
        d -= 1
    while base ** (d + 1) <= value:
        d += 1
    return d


def _span_dom(
    x: SeqSpan, y: SeqSpan, q: int, delta: Fraction, h_from: int, offset: int
) -> bool:
    mx, my = x.model, y.model
    sx, sy = x.start, y.start
    ax, ay = x.mult, y.mult
    c0 = ay * sy - ax * sx + ax  # floor/start correction, same in every family

    def count_x(h0: int) -> int:
        return x.count_ge(pow_delta(delta, h0 + 1)) // ax

    def count_y(h0: int) -> int:
        return y.count_ge(pow_delta(delta, h0 + q + 1)) // ay

    def ladder(bound_ok) -> bool:
        stride = max(4, q)
        for t in range(48):
            h0 = h_from + t * stride
            nx = count_x(h0)
            if nx < 1 or count_y(h0) < 1:
                continue
            if bound_ok(h0, nx):
                return True
        return False

    if isinstance(mx, PowerSeq) and isinstance(my, PowerSeq) and mx.p == my.p:
        p = mx.p
        big_r = (Fraction(my.c) / Fraction(mx.c)) * pow_delta(delta, -q)
        rho_lo = ratio_root_lower(big_r**p.denominator, p.numerator)
        eps = ay * rho_lo - ax
        if eps <= 0:
            return False

        # gap(h) >= A(h) * (ay*rho - ax) - c0 with A the continuous index
        # envelope of x and rho the constant y/x envelope ratio; A only grows.
        def ok(h0: int, nx: int) -> bool:
            a_env = Fraction(nx + sx - 1)
            return a_env * eps - c0 >= offset

        return ladder(ok)

    if isinstance(mx, GeometricSeq) and isinstance(my, GeometricSeq) and mx.r == my.r:
        if ay < ax:
            return False
        big_r = (Fraction(my.c) / Fraction(mx.c)) * pow_delta(delta, -q)
        x_lo = _floor_log_frac(big_r, 1 / mx.r)

        # gap(h) >= (ay-ax)*Y(h) + ay*floor(log_{1/r} R) - c0 with Y the
        # continuous index envelope of x, nondecreasing in h.
        def ok(h0: int, nx: int) -> bool:
            y_env = nx + sx - 1
            return (ay - ax) * y_env + ay * x_lo - c0 >= offset

        return ladder(ok)

    if isinstance(mx, FactorialSeq) and isinstance(my, FactorialSeq):
        if ay < ax:
            return False

        # Both counts track the same n*(h) = max{n : 1/n! >= threshold}; the
        # y threshold is deeper, so y's index is at least x's.
        def ok(h0: int, nx: int) -> bool:
            n_star = nx + sx - 1
            return ay * (n_star - sy + 1) - ax * (n_star - sx + 1) >= offset

        return ladder(ok)

    return False


# ---------------------------------------------------------------------------
# Tail certificates for the unbounded region
#
# After the finite scan has cleared everything up to h_scan, a violating
# window [k, h] with h > h_scan must satisfy U(h) > V(k-1) with k-1 either
# inside the last scanned segment (whose V-minimum v_last is known) or beyond
# the scan; windows spanning a blocked position are settled by infinite-
# bucket absorption. The certificates establish U(h) <= 0 for all h > h_scan
# and V(m) >= 0 for all m > h_scan, which together with v_last >= 0 rules
# every such window out.


def _ray_like(atom) -> tuple:
    if isinstance(atom, SeqRay):
        s = atom.span
        return ("seq", type(s.model).__name__, repr(s.model), s.start, s.mult)
    return (type(atom).__name__, repr(atom))


def _span_atoms(side: _Side) -> list[SeqSpan]:
    return [a.span for a in side.finite_atoms if isinstance(a, SeqRay)]


def _bounded_span_width(model: GeometricSeq, delta: Fraction) -> int:
    """Max values of a geometric sequence sharing one bucket: ceil(log_r delta)+1."""
    w = 1
    acc = Fraction(model.r)
    while acc > delta and w < 256:
        acc *= model.r
        w += 1
    return w + 1


def _rule_density(atom, delta: Fraction):
    """(class, per-bucket count bound or growth base) of a tail atom."""
    if isinstance(atom, ConstantRay):
        return ("const", Fraction(atom.count.n))
    if isinstance(atom, GeometricRay):
        return ("exp", Fraction(atom.base))
    if isinstance(atom, SparseRay):
        return ("sparse", Fraction(1))
    span = atom.span
    m = span.model
    if isinstance(m, PowerSeq):
        return ("exp_root", m.p)  # per-bucket counts grow like delta^(-j/p)
    if isinstance(m, GeometricSeq):
        return ("bounded", Fraction(span.mult * _bounded_span_width(m, delta)))
    if isinstance(m, FactorialSeq):
        return ("sparse", Fraction(span.mult))
    raise TypeError(f"unknown atom {atom!r}")


def _growth_lower(p: Fraction, delta: Fraction) -> Fraction:
    """Rational lower bound for the per-bucket ratio delta^(-1/p) > 1."""
    x = pow_delta(delta, -p.denominator)
    return ratio_root_lower(x, p.numerator)


def _exp_floor_beyond(side: _Side, j0: int, q: int) -> Optional[Fraction]:
    """A proven lower bound on side's count in every single bucket j' > j0 - q,
    using only atoms with provable growth; None when no bound is derivable."""
    best = Fraction(0)
    for atom in side.finite_atoms:
        if isinstance(atom, GeometricRay) and j0 - q >= atom.start:
            cand = Fraction(atom.base) ** (j0 - q)  # counts are monotone
            if cand > best:
                best = cand
        if isinstance(atom, SeqRay) and isinstance(atom.span.model, PowerSeq):
            span = atom.span
            g_lo = _growth_lower(span.model.p, side.delta)
            if g_lo <= 1:
                continue
            cum = span.count_ge(pow_delta(side.delta, j0 - q + 1))
            # One deeper bucket holds floor(g*X) - floor(X) values per copy,
            # at least cum-so-far * (g_lo - 1) - mult in total.
            cand = cum * (g_lo - 1) - span.mult
            if cand > best:
                best = cand
    return best if best > 0 else None


def _tail_certificate(
    a: _Side,
    b: _Side,
    q: int,
    seg_lo: int,
    h_scan: int,
    k_min: Optional[int],
    v_last: int,
) -> Optional[str]:
    """None when no window with content beyond h_scan can violate domination;
    an explanatory string when no certificate applies."""
    a_atoms = list(a.finite_atoms)
    b_atoms = list(b.finite_atoms)
    if not a_atoms:
        return None  # beyond its explicit support a has nothing to dominate
    # Identical unbounded generators cancel window-by-window (the widened
    # window contains the plain one), so only the explicit remainders must
    # dominate on their own — a finite sub-problem, scanned exhaustively.
    if sorted(map(_ray_like, a_atoms)) == sorted(map(_ray_like, b_atoms)):
        ea = _Side(BucketMeasure(a.delta, dict(a.finite_explicit)))
        eb = _Side(BucketMeasure(b.delta, dict(b.finite_explicit)))
        idx = [seg_lo] + ea.structural_indices() + eb.structural_indices()
        hit, _ = _scan_segment(ea, eb, q, seg_lo, max(idx) + q + 2, k_min)
        if hit is None:
            return None
        return "identical tail generators but undominated explicit remainder"
    # Single same-family sequence spans: exact envelope analytics, with the
    # explicit masses folded in as constant offsets.
    sa, sb = _span_atoms(a), _span_atoms(b)
    if len(a_atoms) == 1 and len(b_atoms) == 1 and len(sa) == 1 and len(sb) == 1:
        off_fwd = a.explicit_total() - b.explicit_total()
        fwd = _span_dom(sa[0], sb[0], q, a.delta, h_scan, off_fwd)
        rev = _span_dom(sb[0], sa[0], q, a.delta, h_scan - q, -off_fwd)
        if fwd and rev and v_last >= 0:
            return None
        return (
            "no eventual-domination certificate for tail pair "
            f"{type(sa[0].model).__name__} vs {type(sb[0].model).__name__}"
        )
    # Bounded per-bucket density of a against a proven per-bucket floor of b:
    # split any deep window at h_scan — the scanned part is dominated, and
    # each extra bucket of a (at most cap) is paid by one extra bucket of b.
    da = [_rule_density(x, a.delta) for x in a_atoms]
    db = [_rule_density(x, b.delta) for x in b_atoms]
    if all(k in ("const", "sparse", "bounded") for k, _ in da):
        cap = sum(v for _, v in da)
        floor = _exp_floor_beyond(b, h_scan, q)
        if floor is not None and floor >= cap:
            return None
        if all(k == "const" for k, _ in db):
            cb = sum(v for k, v in db)
            if cb >= cap:
                return None
        return "bounded tail density without a dominating coverage bound"
    return "unsupported tail atom combination"


def _analytic_violation(
    a: _Side, b: _Side, q: int, h_scan: int
) -> Optional[tuple[int, int]]:
    """Construct-and-verify a violating window beyond the scan horizon for
    provable growth mismatches; every candidate is exactly re-counted."""
    a_atoms = list(a.finite_atoms)
    if not a_atoms:
        return None
    try:
        da = [_rule_density(x, a.delta) for x in a_atoms]
        db = [_rule_density(x, b.delta) for x in b.finite_atoms]
    except TypeError:
        return None
    ga = [k for k, _ in da]
    if any(k in ("exp", "exp_root") for k in ga):
        # a's per-bucket counts grow without bound; if b's stay bounded or
        # grow strictly slower, deep single buckets violate.
        return _probe_deep_single(a, b, q, h_scan + 1, 4 * _SCAN_SLACK)
    dens_b = sum(v for k, v in db if k in ("const", "bounded"))
    need = (2 * q + 4) * (int(dens_b) + 1) * 4 + 6 * _SCAN_SLACK
    return _probe_long_window(a, b, q, h_scan + 1, need)


def _probe_long_window(
    a: _Side, b: _Side, q: int, start: int, max_len: int
) -> Optional[tuple[int, int]]:
    ca = 0
    base = b.finite_cum(start - 1 - q)
    for l in range(1, max_len + 1):
        h = start + l - 1
        ca += a.finite_count_at(h)
        if ca > b.finite_cum(h + q) - base:
            return (start, l)
    return None


def _probe_deep_single(
    a: _Side, b: _Side, q: int, lo: int, tries: int
) -> Optional[tuple[int, int]]:
    for j in range(lo, lo + tries):
        if a.finite_count_at(j) > b.finite_cum(j + q) - b.finite_cum(j - q - 1):
            return (j, 1)
    return None


# ---------------------------------------------------------------------------
# One direction at one widening


def _has_sparse(side: _Side) -> bool:
    for x in side.finite_atoms:
        if isinstance(x, SparseRay):
            return True
        if isinstance(x, SeqRay) and isinstance(x.span.model, FactorialSeq):
            return True
    return False


def _sparse_depth(a: _Side, b: _Side, q: int) -> int:
    """Scan depth at which factorial-type cluster gaps exceed the widening,
    so count-rate mismatches between sparse tails become visible windows."""
    marks = 3 * q + 64
    deep = 0
    for side in (a, b):
        for x in side.finite_atoms:
            if isinstance(x, SeqRay) and isinstance(x.span.model, FactorialSeq):
                v = term_value(x.span.model, x.span.start + marks)
                deep = max(deep, bucket_index(v, side.delta))
            elif isinstance(x, SparseRay):
                v = Fraction(1, factorial(marks))
                deep = max(deep, bucket_index(v, side.delta))
    return deep


def _check_direction(
    a: _Side, b: _Side, q: int, k_min: Optional[int]
) -> Union[None, tuple[int, int], str]:
    """None = dominated; (k, l) = violating window of a; str = unsupported."""
    hit = _aleph_coverage(a, b, q, k_min)
    if hit is not None:
        return hit

    blocked = set(j for j, _ in a.aleph_points)
    for j, _ in b.aleph_points:
        blocked.update(range(j - q, j + q + 1))
    hi_cap = None  # beyond this, windows are settled by infinite rays
    if a.aleph_ray_start is not None:
        hi_cap = a.aleph_ray_start - 1
    if b.aleph_ray_start is not None:
        c = b.aleph_ray_start - q - 1
        hi_cap = c if hi_cap is None else min(hi_cap, c)

    structural = a.structural_indices() + b.structural_indices()
    if not structural:
        return None
    lo = min(structural) - q - 2
    if k_min is not None:
        lo = max(lo, k_min)
    h_scan = max(structural) + q + 2 + _SCAN_SLACK
    if _has_sparse(a) or _has_sparse(b):
        h_scan = max(h_scan, _sparse_depth(a, b, q) + 2 * q + 8)
    # Ray starts are structural, so hi_cap (when set) lies below h_scan.
    top = h_scan if hi_cap is None else min(h_scan, hi_cap)

    segments = []
    j = lo
    while j <= top:
        if j in blocked:
            j += 1
            continue
        start = j
        while j <= top and j not in blocked:
            j += 1
        segments.append((start, j - 1))
    v_last = 0
    for seg_lo, seg_hi in segments:
        got, v_min = _scan_segment(a, b, q, seg_lo, seg_hi, k_min)
        if got is not None:
            return got
        v_last = v_min

    if hi_cap is not None:
        return None
    if not a.finite_atoms:
        return None
    last_lo = segments[-1][0] if segments else lo
    cert = _tail_certificate(a, b, q, last_lo, h_scan, k_min, v_last)
    if cert is None:
        return None
    found = _analytic_violation(a, b, q, h_scan)
    if found is not None:
        return found
    return cert


# ---------------------------------------------------------------------------
# Span alignment preprocessing


def _align_seq_rays(a: BucketMeasure, b: BucketMeasure):
    """Equalize start indices of equal-parameter sequence atoms by moving the
    earlier side's leading terms into explicit buckets (exact values only)."""

    def split(m: BucketMeasure):
        seqs = [x for x in m.atoms if isinstance(x, SeqRay)]
        rest = [x for x in m.atoms if not isinstance(x, SeqRay)]
        return seqs, rest

    sa, ra = split(a)
    sb, rb = split(b)
    if len(sa) != 1 or len(sb) != 1:
        return a, b
    pa, pb = sa[0].span, sb[0].span
    if pa.model != pb.model or pa.mult != pb.mult or pa.start == pb.start:
        return a, b

    def advance(m: BucketMeasure, span: SeqSpan, to_start: int, rest) -> BucketMeasure:
        buckets = dict(m.buckets)
        for idx in range(span.start, to_start):
            v = term_value(span.model, idx)
            if v is None:
                return m  # irrational leading values: leave unaligned
            jj = bucket_index(v, m.delta)
            buckets[jj] = card_add(buckets.get(jj, ZERO), Finite(span.mult))
        atoms = tuple(rest) + (SeqRay(SeqSpan(span.model, to_start, span.mult)),)
        return BucketMeasure(m.delta, buckets, atoms, m.kernel_dim, m.cokernel_dim)

    if pa.start < pb.start:
        return advance(a, pa, pb.start, ra), b
    return a, advance(b, pb, pa.start, rb)


# ---------------------------------------------------------------------------
# Public checks


def _check_both(sa: _Side, sb: _Side, q: int, k_min: Optional[int]) -> ConditionOutcome:
    """Both directions at widening q; a located violation outranks unsupported."""
    left = _check_direction(sa, sb, q, k_min)
    right = _check_direction(sb, sa, q, k_min)
    for res, side in ((left, "left"), (right, "right")):
        if isinstance(res, tuple):
            return ConditionOutcome(
                q_used=q, violation=WindowViolation(side, res[0], res[1])
            )
    for res in (left, right):
        if isinstance(res, str):
            return ConditionOutcome(q_used=q, unsupported=res)
    return ConditionOutcome(delta_prime=pow_delta(sa.delta, q), q_used=q)


def _prepare(a: BucketMeasure, b: BucketMeasure) -> tuple[_Side, _Side]:
    if a.delta != b.delta:
        raise DeltaMismatchError(f"measures use different bases {a.delta} and {b.delta}")
    a, b = _align_seq_rays(a, b)
    return _Side(a), _Side(b)


def condition_s_outcome(
    a: BucketMeasure, b: BucketMeasure, q_max: int = 64
) -> ConditionOutcome:
    """Full outcome of the strong window condition (all k), searching q."""
    sa, sb = _prepare(a, b)
    # A violation at the loosest widening certifies failure for every q.
    worst = _check_both(sa, sb, q_max, None)
    if worst.violation is not None:
        return worst
    for q in range(1, q_max + 1):
        out = _check_both(sa, sb, q, None)
        if out.present:
            return out
    raise UnsupportedTailError(
        worst.unsupported
        or "window domination neither certified nor refuted within the search caps"
    )


def check_condition_S(
    a: BucketMeasure, b: BucketMeasure, q_max: int = 64
) -> Optional[Fraction]:
    """delta' = delta^q for the least certified widening q, or None."""
    return condition_s_outcome(a, b, q_max).delta_prime


def condition_s_tilde_outcome(
    a: BucketMeasure,
    b: BucketMeasure,
    q_max: int = 64,
    n_max: int = 64,
) -> ConditionOutcome:
    """Outcome of the cutoff window condition (k >= N), searching (q, N)."""
    sa, sb = _prepare(a, b)
    worst = _check_both(sa, sb, q_max, n_max)
    if worst.violation is not None:
        return ConditionOutcome(
            q_used=worst.q_used, n_cutoff=n_max, violation=worst.violation
        )
    unsupported = worst.unsupported
    for q in range(1, q_max + 1):
        wide = _check_both(sa, sb, q, n_max)
        if wide.unsupported is not None:
            unsupported = wide.unsupported
            continue
        if not wide.present:
            continue
        # Presence is monotone in N (larger N sees fewer windows): binary
        # search the least N that still works at this q.
        lo, hi, best = 1, n_max, n_max
        while lo <= hi:
            mid = (lo + hi) // 2
            if _check_both(sa, sb, q, mid).present:
                best, hi = mid, mid - 1
            else:
                lo = mid + 1
        return ConditionOutcome(
            delta_prime=pow_delta(a.delta, q), n_cutoff=best, q_used=q
        )
    raise UnsupportedTailError(
        unsupported
        or "cutoff window domination neither certified nor refuted within the search caps"
    )


def check_condition_S_tilde(
    a: BucketMeasure, b: BucketMeasure, q_max: int = 64, n_max: int = 64
) -> Optional[tuple[Fraction, int]]:
    """(delta', N) for the least certified (q, N), or None."""
    out = condition_s_tilde_outcome(a, b, q_max, n_max)
    if not out.present:
        return None
    return (out.delta_prime, out.n_cutoff)


def lemma_s_tilde_consistency(
    a: BucketMeasure,
    b: BucketMeasure,
    dims: tuple,
    q_max: int = 64,
    n_max: int = 64,
) -> bool:
    """Cutoff condition on (a, b) agrees with the strong condition on the
    identity-augmented pair (a + I_dimY, b + I_dimX)."""
    dim_x, dim_y = dims
    tilde = check_condition_S_tilde(a, b, q_max, n_max) is not None
    aug_a = merge_measures(a, identity_measure(a.delta, dim_y))
    aug_b = merge_measures(b, identity_measure(b.delta, dim_x))
    strong = check_condition_S(aug_a, aug_b, q_max) is not None
    return tilde == strong
