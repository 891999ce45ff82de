"""Sparse multivariate polynomials keyed by :class:`MultiIndex`.

Coefficients may be any ring elements supporting ``+``, ``*`` and ``== 0``
(``QSqrt2`` for exact work, ``float`` once a problem goes to the solver).
"""

from __future__ import annotations

from types import MappingProxyType
from typing import Callable, Dict, Iterator, Mapping, Optional, Sequence, Tuple

from ..errors import DimensionError
from .multiindex import MultiIndex

__all__ = ["Polynomial", "add", "mul", "scale", "evaluate"]


class Polynomial:
    """Immutable sparse polynomial in ``num_vars`` variables."""

    __slots__ = ("_terms", "_n", "_hash")

    def __init__(self, terms: Mapping, num_vars: int):
        if num_vars < 0:
            raise DimensionError("num_vars must be nonnegative")
        clean: Dict[MultiIndex, object] = {}
        for alpha, coef in terms.items():
            alpha = MultiIndex(alpha)
            if len(alpha) != num_vars:
                raise DimensionError(f"exponent {tuple(alpha)} does not have {num_vars} entries")
            if coef == 0:
                continue
            if alpha in clean:
                coef = clean[alpha] + coef
                if coef == 0:
                    del clean[alpha]
                    continue
            clean[alpha] = coef
        self._terms = clean
        self._n = num_vars
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int) -> Polynomial:
        return cls({}, num_vars)

    @classmethod
    def constant(cls, c, num_vars: int) -> Polynomial:
        return cls({MultiIndex.zero(num_vars): c}, num_vars)

    @classmethod
    def variable(cls, i: int, num_vars: int, one=1) -> Polynomial:
        return cls({MultiIndex.unit(i, num_vars): one}, num_vars)

    @classmethod
    def monomial(cls, alpha: Sequence[int], coef=1) -> Polynomial:
        alpha = MultiIndex(alpha)
        return cls({alpha: coef}, len(alpha))

    @classmethod
    def _raw(cls, terms: Dict[MultiIndex, object], num_vars: int) -> Polynomial:
        p = object.__new__(cls)
        p._terms = terms
        p._n = num_vars
        p._hash = None
        return p

    # -- inspection -----------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[MultiIndex, object]:
        return MappingProxyType(self._terms)

    @property
    def degree(self) -> Optional[int]:
        """Total degree, or ``None`` for the zero polynomial (degree undefined)."""
        if not self._terms:
            return None
        return max(alpha.degree for alpha in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, alpha, default=0):
        return self._terms.get(MultiIndex(alpha), default)

    def sorted_terms(self) -> Tuple[Tuple[MultiIndex, object], ...]:
        return tuple(sorted(self._terms.items(), key=lambda t: t[0].grlex_key()))

    def __iter__(self) -> Iterator[Tuple[MultiIndex, object]]:
        return iter(self.sorted_terms())

    def __len__(self):
        return len(self._terms)

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other: Polynomial):
        if other._n != self._n:
            raise DimensionError(f"polynomials in {self._n} and {other._n} variables")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            o = Polynomial.constant(other, self._n)
        terms = dict(self._terms)
        for alpha, c in o._terms.items():
            if alpha in terms:
                s = terms[alpha] + c
                if s == 0:
                    del terms[alpha]
                else:
                    terms[alpha] = s
            else:
                terms[alpha] = c
        return Polynomial._raw(terms, self._n)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({a: -c for a, c in self._terms.items()}, self._n)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return self.scale(other)
        terms: Dict[MultiIndex, object] = {}
        for a, c in self._terms.items():
            for b, e in o._terms.items():
                key = a + b
                v = c * e
                if key in terms:
                    terms[key] = terms[key] + v
                else:
                    terms[key] = v
        return Polynomial._raw({k: v for k, v in terms.items() if v != 0}, self._n)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> Polynomial:
        if c == 0:
            return Polynomial.zero(self._n)
        terms = {}
        for a, v in self._terms.items():
            w = c * v
            if w != 0:
                terms[a] = w
        return Polynomial._raw(terms, self._n)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        one = next(iter(self._terms.values()), 1)
        one = one * 0 + 1
        result = Polynomial.constant(one, self._n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, point):
        return self.eval(point)

    def eval(self, point: Sequence):
        if len(point) != self._n:
            raise DimensionError(f"point has {len(point)} coordinates, expected {self._n}")
        total = 0
        for alpha, c in self._terms.items():
            v = c
            for x, e in zip(point, alpha):
                if e:
                    v = v * x**e
            total = total + v
        return total

    def diff(self, i: int) -> Polynomial:
        """Partial derivative with respect to variable ``i`` (0-based)."""
        if not 0 <= i < self._n:
            raise DimensionError(f"variable index {i} out of range")
        terms = {}
        for alpha, c in self._terms.items():
            e = alpha[i]
            if e == 0:
                continue
            beta = list(alpha)
            beta[i] -= 1
            terms[tuple.__new__(MultiIndex, beta)] = c * e
        return Polynomial._raw(terms, self._n)

    def map_coefficients(self, fn: Callable) -> Polynomial:
        return Polynomial({a: fn(c) for a, c in self._terms.items()}, self._n)

    def to_float(self) -> Polynomial:
        return self.map_coefficients(float)

    # -- comparison -------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._n == other._n and self._terms == other._terms
        if not self._terms:
            return other == 0
        if len(self._terms) == 1:
            (alpha, c), = self._terms.items()
            return alpha.degree == 0 and c == other
        return False

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        from .text import render_polynomial

        return render_polynomial(self)


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def scale(c, p: Polynomial) -> Polynomial:
    return p.scale(c)


def evaluate(p: Polynomial, point: Sequence):
    return p.eval(point)
