"""Multi-indices (exponent vectors) and graded-lexicographic enumeration."""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Tuple

from ..errors import DimensionError

__all__ = ["MultiIndex", "monomials_up_to", "monomials_of_degree", "num_monomials"]


class MultiIndex(tuple):
    """Exponent vector ``(a_1, ..., a_n)`` of the monomial ``x_1^a_1 ... x_n^a_n``.

    Hashes and compares equal to the plain tuple, so dictionaries keyed by
    ``MultiIndex`` accept tuples for lookup.  Ordering is graded
    lexicographic: lower total degree first, then larger leading exponent
    first, so ``(1, 0)`` precedes ``(0, 1)``.  ``+`` adds componentwise.
    """

    __slots__ = ()

    def __new__(cls, exponents: Iterable[int]):
        if isinstance(exponents, MultiIndex):
            return exponents
        values = tuple(int(e) for e in exponents)
        if any(e < 0 for e in values):
            raise ValueError(f"negative exponent in {values}")
        return tuple.__new__(cls, values)

    @classmethod
    def zero(cls, n: int) -> MultiIndex:
        return tuple.__new__(cls, (0,) * n)

    @classmethod
    def unit(cls, i: int, n: int) -> MultiIndex:
        e = [0] * n
        e[i] = 1
        return tuple.__new__(cls, e)

    @property
    def degree(self) -> int:
        return sum(self)

    @property
    def num_vars(self) -> int:
        return len(self)

    def __add__(self, other):
        if len(other) != len(self):
            raise DimensionError(f"cannot add multi-indices of lengths {len(self)} and {len(other)}")
        return tuple.__new__(MultiIndex, tuple(a + b for a, b in zip(self, other)))

    __radd__ = __add__

    def __mul__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        return tuple.__new__(MultiIndex, tuple(a * k for a in self))

    __rmul__ = __mul__

    def grlex_key(self) -> Tuple:
        return (sum(self), tuple(-a for a in self))

    def __lt__(self, other):
        return self.grlex_key() < MultiIndex(other).grlex_key()

    def __le__(self, other):
        return self.grlex_key() <= MultiIndex(other).grlex_key()

    def __gt__(self, other):
        return self.grlex_key() > MultiIndex(other).grlex_key()

    def __ge__(self, other):
        return self.grlex_key() >= MultiIndex(other).grlex_key()

    def __repr__(self):
        return f"MultiIndex({tuple(self)})"


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def monomials_of_degree(n: int, k: int) -> Tuple[MultiIndex, ...]:
    if n < 1:
        raise DimensionError("need at least one variable")
    return tuple(tuple.__new__(MultiIndex, c) for c in _compositions(k, n))


@lru_cache(maxsize=None)
def monomials_up_to(n: int, d: int) -> Tuple[MultiIndex, ...]:
    """All multi-indices in ``n`` variables with degree at most ``d``, graded-lex."""
    if n < 1:
        raise DimensionError("need at least one variable")
    if d < 0:
        raise ValueError("degree bound must be nonnegative")
    out = []
    for k in range(d + 1):
        out.extend(monomials_of_degree(n, k))
    return tuple(out)


def num_monomials(n: int, d: int) -> int:
    return comb(n + d, d) if d >= 0 else 0
