"""Moment sequences, the Riesz functional, moment and localizing matrices."""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import Callable, Dict, Mapping, Sequence, Tuple, Union

import numpy as np

from .algebra import MultiIndex, Polynomial, QSqrt2, monomials_up_to
from .errors import DegenerateConstraintError, DimensionError, IncompleteSequenceError

__all__ = [
    "MomentSequence",
    "SymMatrix",
    "riesz",
    "moment_matrix",
    "localizing_matrix",
    "degree_bound",
    "counterexample_sequence",
    "counterexample_moments",
    "dirac_moments",
]


class MomentSequence(Mapping):
    """Dense table ``alpha -> y_alpha`` for every ``|alpha| <= max_degree``."""

    def __init__(self, values: Mapping, num_vars: int, max_degree: int):
        table: Dict[MultiIndex, object] = {}
        for alpha in monomials_up_to(num_vars, max_degree):
            if alpha not in values:
                raise IncompleteSequenceError(f"moment y_{tuple(alpha)} missing")
            table[alpha] = values[alpha]
        self._values = table
        self.num_vars = num_vars
        self.max_degree = max_degree

    @classmethod
    def from_function(cls, fn: Callable[[MultiIndex], object], num_vars: int, max_degree: int):
        return cls({a: fn(a) for a in monomials_up_to(num_vars, max_degree)}, num_vars, max_degree)

    @classmethod
    def from_vector(cls, vector: Sequence, num_vars: int, max_degree: int):
        labels = monomials_up_to(num_vars, max_degree)
        if len(vector) != len(labels):
            raise DimensionError(f"expected {len(labels)} moments, got {len(vector)}")
        return cls(dict(zip(labels, vector)), num_vars, max_degree)

    @property
    def normalized(self) -> bool:
        return self._values[MultiIndex.zero(self.num_vars)] == 1

    def __getitem__(self, alpha):
        try:
            return self._values[alpha]
        except KeyError:
            raise IncompleteSequenceError(
                f"moment y_{tuple(alpha)} beyond degree {self.max_degree}"
            ) from None

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def to_vector(self) -> list:
        return [self._values[a] for a in monomials_up_to(self.num_vars, self.max_degree)]

    def __repr__(self):
        return f"MomentSequence(num_vars={self.num_vars}, max_degree={self.max_degree})"


@dataclass(frozen=True)
class SymMatrix:
    """Symmetric matrix with its rows labelled by multi-indices."""

    entries: Tuple[Tuple[object, ...], ...]
    row_labels: Tuple[MultiIndex, ...]

    def __post_init__(self):
        n = len(self.row_labels)
        if len(self.entries) != n or any(len(r) != n for r in self.entries):
            raise DimensionError("entries do not match the number of row labels")
        for i in range(n):
            for j in range(i):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError(f"matrix not symmetric at ({i}, {j})")

    @property
    def dim(self) -> int:
        return len(self.row_labels)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries], dtype=float)


Sequence_ = Union[MomentSequence, Mapping, Callable[[MultiIndex], object]]


def _lookup(y: Sequence_) -> Callable[[MultiIndex], object]:
    if callable(y) and not isinstance(y, Mapping):
        return y

    def get(alpha):
        try:
            return y[alpha]
        except KeyError:
            raise IncompleteSequenceError(f"moment y_{tuple(alpha)} missing") from None

    return get


def _num_vars(y, fallback: int) -> int:
    return getattr(y, "num_vars", fallback)


def _require_degree(y, needed: int, what: str):
    have = getattr(y, "max_degree", None)
    if have is not None and have < needed:
        raise IncompleteSequenceError(f"{what} needs moments up to degree {needed}, sequence stops at {have}")


def riesz(f: Polynomial, y: Sequence_):
    """``L_y(f) = sum_alpha f_alpha * y_alpha``."""
    n = _num_vars(y, f.num_vars)
    if n != f.num_vars:
        raise DimensionError(f"polynomial in {f.num_vars} variables, sequence in {n}")
    if not f.is_zero():
        _require_degree(y, f.degree, "riesz functional")
    get = _lookup(y)
    total = 0
    for alpha, c in f.terms.items():
        total = total + c * get(alpha)
    return total


def moment_matrix(y: Sequence_, d: int, num_vars: int = None) -> SymMatrix:
    n = num_vars if num_vars is not None else _num_vars(y, None)
    if n is None:
        raise DimensionError("num_vars required for a callable sequence")
    _require_degree(y, 2 * d, "moment matrix")
    get = _lookup(y)
    labels = monomials_up_to(n, d)
    rows = []
    for i, a in enumerate(labels):
        rows.append(tuple(get(a + b) for b in labels))
    return SymMatrix(tuple(rows), labels)


def localizing_matrix(g: Polynomial, y: Sequence_, e: int) -> SymMatrix:
    """Matrix with entry ``(alpha, beta) = sum_gamma g_gamma y_{alpha+beta+gamma}``."""
    n = g.num_vars
    if _num_vars(y, n) != n:
        raise DimensionError("constraint and sequence disagree on num_vars")
    if e < 0:
        raise ValueError("localizing order must be nonnegative")
    if g.is_zero():
        raise DegenerateConstraintError("zero constraint polynomial")
    _require_degree(y, 2 * e + g.degree, "localizing matrix")
    get = _lookup(y)
    labels = monomials_up_to(n, e)
    g_terms = list(g.terms.items())
    cache: Dict[MultiIndex, object] = {}

    def entry(s):
        if s not in cache:
            total = 0
            for gamma, c in g_terms:
                total = total + c * get(s + gamma)
            cache[s] = total
        return cache[s]

    rows = tuple(tuple(entry(a + b) for b in labels) for a in labels)
    return SymMatrix(rows, labels)


def degree_bound(g: Polynomial) -> int:
    """``k = max ceil(|alpha|/2)`` over the support of ``g``."""
    if g.is_zero():
        raise DegenerateConstraintError("zero constraint polynomial has no degree bound")
    return max(ceil(alpha.degree / 2) for alpha in g.terms)


def counterexample_sequence(alpha: Sequence[int]) -> QSqrt2:
    """Closed-form moment ``y_alpha`` feasible for every SDSOS relaxation order.

    ``(1 + (-1)^a1 + (-1)^a2 - (-1)^(a1+a2)) / (2 * sqrt(2^(a1+a2)))``.
    """
    if len(alpha) != 2:
        raise DimensionError("the counterexample sequence lives in 2 variables")
    a1, a2 = int(alpha[0]), int(alpha[1])
    if a1 < 0 or a2 < 0:
        raise ValueError("negative exponent")
    numerator = 1 + (-1) ** a1 + (-1) ** a2 - (-1) ** (a1 + a2)
    return QSqrt2.sqrt2_power(-(a1 + a2)) * QSqrt2(numerator, 0) / 2


def counterexample_moments(max_degree: int) -> MomentSequence:
    return MomentSequence.from_function(counterexample_sequence, 2, max_degree)


def dirac_moments(point: Sequence, max_degree: int) -> MomentSequence:
    """Moments of the point mass at ``point`` (exact if the coordinates are)."""
    n = len(point)

    def value(alpha):
        v = 1
        for x, e in zip(point, alpha):
            v = v * x**e
        return v

    return MomentSequence.from_function(value, n, max_degree)
