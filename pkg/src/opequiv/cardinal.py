"""Exact dimension arithmetic: natural numbers plus a few infinite levels.

Dimensions of kernels, spectral subspaces and ambient spaces are either
finite or one of the symbolic infinite levels aleph0 < aleph1 < aleph2.
Addition is absorptive (the larger infinite level wins), the order is
total, and there is deliberately no subtraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

MAX_ALEPH_LEVEL = 2


@dataclass(frozen=True, order=False)
class Finite:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"negative dimension {self.n}")

    def __repr__(self):
        return f"Finite({self.n})"


@dataclass(frozen=True, order=False)
class Aleph:
    level: int

    def __post_init__(self):
        if not 0 <= self.level <= MAX_ALEPH_LEVEL:
            raise ValueError(f"aleph level {self.level} outside 0..{MAX_ALEPH_LEVEL}")

    def __repr__(self):
        return f"Aleph({self.level})"


Cardinal = Union[Finite, Aleph]

ZERO = Finite(0)
ONE = Finite(1)
ALEPH0 = Aleph(0)


def as_cardinal(value: Union[int, Cardinal]) -> Cardinal:
    """Coerce a plain int to Finite; pass cardinals through."""
    if isinstance(value, (Finite, Aleph)):
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"not a cardinal: {value!r}")
    return Finite(value)


def is_finite(c: Cardinal) -> bool:
    return isinstance(c, Finite)


def card_add(a: Cardinal, b: Cardinal) -> Cardinal:
    """Cardinal sum: finite addition, infinite levels absorb."""
    if isinstance(a, Finite) and isinstance(b, Finite):
        return Finite(a.n + b.n)
    if isinstance(a, Finite):
        return b
    if isinstance(b, Finite):
        return a
    return Aleph(max(a.level, b.level))


def card_sum(items) -> Cardinal:
    total: Cardinal = ZERO
    for c in items:
        total = card_add(total, c)
    return total


def card_scale(c: Cardinal, k: int) -> Cardinal:
    """c added to itself k times (k a natural number)."""
    if k < 0:
        raise ValueError(f"negative multiplier {k}")
    if k == 0:
        return ZERO
    if isinstance(c, Finite):
        return Finite(c.n * k)
    return c


def card_le(a: Cardinal, b: Cardinal) -> bool:
    """Total order: every finite below every aleph, alephs by level."""
    if isinstance(a, Finite):
        return isinstance(b, Aleph) or a.n <= b.n
    return isinstance(b, Aleph) and a.level <= b.level


def card_lt(a: Cardinal, b: Cardinal) -> bool:
    return card_le(a, b) and a != b


def card_max(a: Cardinal, b: Cardinal) -> Cardinal:
    return b if card_le(a, b) else a


def card_min(a: Cardinal, b: Cardinal) -> Cardinal:
    return a if card_le(a, b) else b


def card_to_json(c: Cardinal):
    """Serialize: plain int, or "aleph<level>"."""
    if isinstance(c, Finite):
        return c.n
    return f"aleph{c.level}"


def card_from_json(value) -> Cardinal:
    """Parse an int or an "aleph<level>" string."""
    if isinstance(value, bool):
        raise ValueError(f"not a cardinal: {value!r}")
    if isinstance(value, int):
        return Finite(value)
    if isinstance(value, str) and value.startswith("aleph"):
        suffix = value[5:]
        if suffix.isdigit():
            return Aleph(int(suffix))
    raise ValueError(f"not a cardinal: {value!r}")
