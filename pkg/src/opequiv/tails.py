"""Closed-form tail models for diagonal value sequences, with exact counting.

A tail model describes the infinite part of a nonincreasing positive value
sequence: geometric c*r^n, power c*n^(-p), or reciprocal factorial 1/n!.
Everything here is decided with exact integer/rational arithmetic; no model
value is ever approximated by a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import DeltaRangeError


def check_delta(delta: Fraction) -> Fraction:
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise DeltaRangeError(f"delta must lie in (0, 1), got {delta}")
    return delta


def iroot(x: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer."""
    if x < 0 or k < 1:
        raise ValueError("iroot needs x >= 0, k >= 1")
    if x in (0, 1) or k == 1:
        return x
    r = int(round(x ** (1.0 / k)))
    while r > 0 and r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def pow_delta(delta: Fraction, j: int) -> Fraction:
    """delta**j for any integer j, exactly."""
    if j >= 0:
        return Fraction(delta.numerator**j, delta.denominator**j)
    return Fraction(delta.denominator**-j, delta.numerator**-j)


def bucket_index(value: Fraction, delta: Fraction) -> int:
    """The j with delta^(j+1) <= value < delta^j."""
    value = Fraction(value)
    if value <= 0:
        raise ValueError(f"bucket_index needs a positive value, got {value}")
    # Initial guess from integer logs (float(value) may under- or overflow
    # for extreme fractions), then correct exactly.
    lv = math.log2(value.numerator) - math.log2(value.denominator)
    ld = min(math.log2(delta.numerator) - math.log2(delta.denominator), -1e-12)
    j = int(math.floor(lv / ld))
    while value >= pow_delta(delta, j):
        j -= 1
    while value < pow_delta(delta, j + 1):
        j += 1
    return j


def ratio_root_lower(x: Fraction, k: int, scale: int = 10**9) -> Fraction:
    """A rational lower bound for x**(1/k) (x > 0), exact when possible."""
    if x <= 0:
        raise ValueError("positive x required")
    if k == 1:
        return x
    num = iroot(x.numerator * scale**k // x.denominator, k)
    guess = Fraction(num, scale)
    if guess > 0 and guess**k > x:  # guard against were-rounding
        guess = Fraction(num - 1, scale)
    return guess


def ratio_root_upper(x: Fraction, k: int, scale: int = 10**9) -> Fraction:
    """A rational upper bound for x**(1/k) (x > 0), exact when possible."""
    if x <= 0:
        raise ValueError("positive x required")
    if k == 1:
        return x
    num = iroot(x.numerator * scale**k // x.denominator, k)
    guess = Fraction(num, scale)
    while guess**k < x:
        num += 1
        guess = Fraction(num, scale)
    return guess


# ---------------------------------------------------------------------------
# Tail models (value sequences, model index n >= 1)


@dataclass(frozen=True)
class ZeroTail:
    pass


@dataclass(frozen=True)
class GeometricSeq:
    """term(n) = c * r**n."""

    c: Fraction
    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "r", Fraction(self.r))
        if self.c <= 0 or not 0 < self.r < 1:
            raise ValueError(f"geometric tail needs c > 0, 0 < r < 1, got {self}")


@dataclass(frozen=True)
class PowerSeq:
    """term(n) = c * n**(-p)."""

    c: Fraction
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "p", Fraction(self.p))
        if self.c <= 0 or self.p <= 0:
            raise ValueError(f"power tail needs c > 0, p > 0, got {self}")


@dataclass(frozen=True)
class FactorialSeq:
    """term(n) = 1 / n!."""


TailModel = Union[ZeroTail, GeometricSeq, PowerSeq, FactorialSeq]

_FACTORIALS = [1, 1]


def factorial(n: int) -> int:
    while len(_FACTORIALS) <= n:
        _FACTORIALS.append(_FACTORIALS[-1] * len(_FACTORIALS))
    return _FACTORIALS[n]


def term_value(model: TailModel, n: int) -> Optional[Fraction]:
    """Exact value of term n, or None when it is irrational (fractional p)."""
    if n < 1:
        raise ValueError("model index starts at 1")
    if isinstance(model, GeometricSeq):
        return model.c * model.r**n
    if isinstance(model, PowerSeq):
        p = model.p
        if p.denominator == 1:
            return model.c * Fraction(1, n ** p.numerator)
        return None
    if isinstance(model, FactorialSeq):
        return Fraction(1, factorial(n))
    raise TypeError(f"no terms on {model!r}")


def term_cmp(model: TailModel, n: int, t: Fraction) -> int:
    """Sign of term(n) - t, exactly (works for fractional powers too)."""
    t = Fraction(t)
    if isinstance(model, PowerSeq):
        a, b = model.p.numerator, model.p.denominator
        # c * n^(-a/b) vs t  <=>  c^b vs t^b * n^a
        lhs = model.c.numerator**b * t.denominator**b
        rhs = t.numerator**b * model.c.denominator**b * n**a
        return (lhs > rhs) - (lhs < rhs)
    value = term_value(model, n)
    return (value > t) - (value < t)


def count_ge(model: TailModel, start: int, t: Fraction) -> int:
    """#{n >= start : term(n) >= t} for a decreasing model and t > 0."""
    t = Fraction(t)
    if t <= 0:
        raise ValueError("threshold must be positive")
    if isinstance(model, ZeroTail):
        return 0
    if term_cmp(model, start, t) < 0:
        return 0
    # Find the largest n with term(n) >= t by doubling + bisection.
    lo = start
    hi = start + 1
    while term_cmp(model, hi, t) >= 0:
        lo = hi
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if term_cmp(model, mid, t) >= 0:
            lo = mid
        else:
            hi = mid
    return lo - start + 1


@dataclass(frozen=True)
class SeqSpan:
    """A run of tail terms: model indices n >= start, each value mult times."""

    model: TailModel
    start: int = 1
    mult: int = 1

    def __post_init__(self):
        if self.start < 1 or self.mult < 1:
            raise ValueError(f"bad sequence span {self}")
        if isinstance(self.model, ZeroTail):
            raise ValueError("zero tail has no terms")

    def count_ge(self, t: Fraction) -> int:
        return self.mult * count_ge(self.model, self.start, t)

    def cum_to_bucket(self, delta: Fraction, h: int) -> int:
        """Number of values in buckets <= h, i.e. values >= delta^(h+1)."""
        return self.count_ge(pow_delta(delta, h + 1))

    def bucket_count(self, delta: Fraction, j: int) -> int:
        return self.cum_to_bucket(delta, j) - self.cum_to_bucket(delta, j - 1)

    def first_bucket(self, delta: Fraction) -> int:
        """Bucket index of the first (largest) tail term."""
        lo = -1
        while self.cum_to_bucket(delta, lo) > 0:
            lo -= 16
        hi = lo
        while self.cum_to_bucket(delta, hi) == 0:
            hi += 1
        return hi

    def first_term_value(self) -> Optional[Fraction]:
        return term_value(self.model, self.start)

    def drop_head(self, k: int) -> Optional["SeqSpan"]:
        """The span with the first k values removed (k a multiple of mult)."""
        if k % self.mult:
            return None
        return SeqSpan(self.model, self.start + k // self.mult, self.mult)


# ---------------------------------------------------------------------------
# The sparse factorial bucket rule: count 1 at indices floor(log_{1/delta} n!)

_SPARSE_CACHE: dict[Fraction, tuple[list[int], int, int]] = {}


def _sparse_indices(delta: Fraction, up_to: int) -> list[int]:
    """Sorted distinct indices of the rule that are <= up_to."""
    marks, n, fact = _SPARSE_CACHE.get(delta, ([], 1, 1))
    q, p = delta.denominator, delta.numerator  # 1/delta = q/p
    while True:
        j = _floor_log(fact, q, p)
        if j > up_to:
            break
        if not marks or j > marks[-1]:
            marks.append(j)
        n += 1
        fact *= n
    _SPARSE_CACHE[delta] = (marks, n, fact)
    return [j for j in marks if j <= up_to]


def _floor_log(value: int, q: int, p: int) -> int:
    """floor(log_{q/p}(value)) for value >= 1 and q/p > 1."""
    j = 0
    while q ** (j + 1) <= value * p ** (j + 1):
        j += 1
    return j


def sparse_rule_count(delta: Fraction, k: int, h: int) -> int:
    """Number of rule indices in [k, h]."""
    if h < 0 or h < k:
        return 0
    marks = _sparse_indices(delta, h)
    return sum(1 for j in marks if j >= k)


def sparse_rule_cum(delta: Fraction, h: int) -> int:
    return sparse_rule_count(delta, 0, h) if h >= 0 else 0
