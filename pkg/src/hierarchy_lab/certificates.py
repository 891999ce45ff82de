"""Exact checks over Q(sqrt2): certificate identities, cone membership,
moment feasibility, KKT residuals and constant-Hessian convexity."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from itertools import combinations
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .algebra import MultiIndex, Polynomial, QSqrt2
from .errors import (
    DimensionError,
    InvalidDecompositionError,
    SolverFailureError,
    UnsupportedError,
)
from .moments import localizing_matrix, moment_matrix, riesz
from .relaxations import Hierarchy, HierarchyKind, PolyProblem, build_relaxation, premultiplier

__all__ = [
    "Cone",
    "WeightedSquare",
    "Multiplier",
    "Certificate",
    "verify_identity",
    "classify_multiplier",
    "gram_matrix",
    "is_psd_2x2",
    "check_moment_feasibility",
    "moment_feasibility_report",
    "FeasibilityReport",
    "KKTResidual",
    "kkt_residual",
    "hessian",
    "check_hessian_psd_constant",
    "certify_nonexistence_report",
    "NonexistenceReport",
    "NonexistenceRow",
]


def _exact(c) -> QSqrt2:
    if isinstance(c, QSqrt2):
        return c
    try:
        return QSqrt2(c)
    except TypeError as exc:
        raise TypeError(f"exact coefficient required, got {c!r}") from exc


class Cone(IntEnum):
    """Multiplier cones ordered by inclusion: DSOS < SDSOS < SOS."""

    DSOS = 0
    SDSOS = 1
    SOS = 2

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class WeightedSquare:
    """``weight * poly^2`` with ``weight >= 0``."""

    weight: QSqrt2
    poly: Polynomial

    def __post_init__(self):
        object.__setattr__(self, "weight", _exact(self.weight))
        if self.weight.sign() < 0:
            raise InvalidDecompositionError(f"negative weight {self.weight}")

    def expand(self) -> Polynomial:
        return (self.poly * self.poly).scale(self.weight)

    @property
    def support(self) -> Tuple[MultiIndex, ...]:
        return tuple(a for a, _ in self.poly.sorted_terms())


@dataclass(frozen=True)
class Multiplier:
    """A multiplier ``sigma`` given as a sum of weighted squares.

    ``num_vars`` is only needed for the empty (zero) multiplier.
    """

    squares: Tuple[WeightedSquare, ...]
    num_vars: int = 0
    cone: Optional[Cone] = None

    def __post_init__(self):
        object.__setattr__(self, "squares", tuple(self.squares))
        if self.squares:
            n = self.squares[0].poly.num_vars
            if any(s.poly.num_vars != n for s in self.squares):
                raise DimensionError("squares disagree on num_vars")
            object.__setattr__(self, "num_vars", n)
        if self.cone is not None:
            object.__setattr__(self, "cone", Cone(self.cone))
            if self.cone <= Cone.SDSOS and any(len(s.support) > 2 for s in self.squares):
                raise InvalidDecompositionError("an SDSOS square involves at most two monomials")

    @classmethod
    def constant(cls, c, num_vars: int) -> Multiplier:
        """The constant multiplier ``c = c * 1^2``."""
        return cls((WeightedSquare(_exact(c), Polynomial.constant(1, num_vars)),), num_vars)

    def polynomial(self) -> Polynomial:
        total = Polynomial.zero(self.num_vars)
        for s in self.squares:
            total = total + s.expand()
        return total


@dataclass(frozen=True)
class Certificate:
    """``(sum x_j^2)^r (f - lam) = sigma_0 + sum_i sigma_i g_i``."""

    lam: QSqrt2
    sigmas: Tuple[Multiplier, ...]
    r: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lam", _exact(self.lam))
        object.__setattr__(self, "sigmas", tuple(self.sigmas))
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if not self.sigmas:
            raise InvalidDecompositionError("a certificate needs at least sigma_0")


def verify_identity(problem: PolyProblem, cert: Certificate) -> Polynomial:
    """Exact residual ``p^r (f - lam) - sigma_0 - sum sigma_i g_i``; zero certifies."""
    n = problem.num_vars
    if len(cert.sigmas) != len(problem.constraints) + 1:
        raise DimensionError(
            f"{len(problem.constraints)} constraints need {len(problem.constraints) + 1} multipliers, "
            f"got {len(cert.sigmas)}"
        )
    for s in cert.sigmas:
        if s.squares and s.num_vars != n:
            raise DimensionError("multiplier and problem disagree on num_vars")
    lhs = problem.objective - cert.lam
    if cert.r:
        lhs = premultiplier(n, cert.r) * lhs
    rhs = cert.sigmas[0].polynomial() if cert.sigmas[0].squares else Polynomial.zero(n)
    for sigma, g in zip(cert.sigmas[1:], problem.constraints):
        if sigma.squares:
            rhs = rhs + sigma.polynomial() * g
    return lhs - rhs


def gram_matrix(squares: Sequence[WeightedSquare]) -> Tuple[Tuple[MultiIndex, ...], List[List[QSqrt2]]]:
    """Exact Gram matrix ``sum w c c^T`` over the union of the squares' supports."""
    basis = sorted({a for s in squares for a in s.support})
    pos = {a: i for i, a in enumerate(basis)}
    G = [[QSqrt2(0) for _ in basis] for _ in basis]
    for s in squares:
        items = [(pos[a], _exact(c)) for a, c in s.poly.sorted_terms()]
        for i, ci in items:
            for j, cj in items:
                G[i][j] = G[i][j] + s.weight * ci * cj
    return tuple(basis), G


def classify_multiplier(sigma: Union[Multiplier, Sequence[WeightedSquare]]) -> Cone:
    """Tightest cone the decomposition certifies.

    SDSOS when every square has at most two monomials; DSOS when, in
    addition, the assembled Gram matrix is diagonally dominant.
    """
    squares = sigma.squares if isinstance(sigma, Multiplier) else tuple(sigma)
    for s in squares:
        if not isinstance(s, WeightedSquare):
            raise InvalidDecompositionError("expected weighted squares")
        if s.weight.sign() < 0:
            raise InvalidDecompositionError(f"negative weight {s.weight}")
    if any(len(s.support) > 2 for s in squares):
        return Cone.SOS
    _, G = gram_matrix(squares)
    for i, row in enumerate(G):
        off = QSqrt2(0)
        for j, v in enumerate(row):
            if j != i:
                off = off + abs(v)
        if row[i] < off:
            return Cone.SDSOS
    return Cone.DSOS


def is_psd_2x2(a, b, c) -> bool:
    """Exact PSD test for ``[[a, b], [b, c]]``."""
    a, b, c = _exact(a), _exact(b), _exact(c)
    return a.sign() >= 0 and c.sign() >= 0 and (a * c - b * b).sign() >= 0


@dataclass
class FeasibilityReport:
    normalized: bool
    moment_failures: List[Tuple[MultiIndex, MultiIndex]] = field(default_factory=list)
    localizing_failures: List[Tuple[int, MultiIndex, MultiIndex]] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.normalized and not self.moment_failures and not self.localizing_failures


def _pair_failures(M) -> List[Tuple[MultiIndex, MultiIndex]]:
    labels = M.row_labels
    E = [[_exact(v) for v in row] for row in M.entries]
    bad = []
    for i in range(len(labels)):
        if E[i][i].sign() < 0:
            bad.append((labels[i], labels[i]))
    for i, j in combinations(range(len(labels)), 2):
        if not is_psd_2x2(E[i][i], E[i][j], E[j][j]):
            bad.append((labels[i], labels[j]))
    return bad


def moment_feasibility_report(y, d: int, constraints: Union[None, Polynomial, Sequence[Polynomial]] = None,
                              num_vars: Optional[int] = None) -> FeasibilityReport:
    """Exact SDSOS-side feasibility of ``y`` at order ``d``.

    Checks ``y_0 = 1``, every 2x2 principal minor of ``M_d(y)`` and every 2x2
    principal minor of the localizing matrix of each constraint, built with
    rows up to degree ``d`` (so ``y`` must reach degree ``2d + deg g``).
    """
    if isinstance(constraints, Polynomial):
        constraints = (constraints,)
    constraints = tuple(constraints or ())
    if num_vars is None and constraints:
        num_vars = constraints[0].num_vars
    M = moment_matrix(y, d, num_vars)
    n = len(M.row_labels[0])
    zero = M.row_labels.index(MultiIndex.zero(n))
    report = FeasibilityReport(normalized=_exact(M.entries[zero][zero]) == 1)
    report.moment_failures = _pair_failures(M)
    for k, g in enumerate(constraints):
        L = localizing_matrix(g, y, d)
        report.localizing_failures.extend((k, a, b) for a, b in _pair_failures(L))
    return report


def check_moment_feasibility(y, d: int, g: Union[None, Polynomial, Sequence[Polynomial]] = None,
                             num_vars: Optional[int] = None) -> bool:
    return moment_feasibility_report(y, d, g, num_vars).feasible


class KKTResidual(NamedTuple):
    stationarity: Tuple
    dual_sign: object
    primal_feasibility: object
    complementarity: object

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.stationarity) and all(
            v == 0 for v in (self.dual_sign, self.primal_feasibility, self.complementarity)
        )

    def max_abs(self) -> float:
        return max(abs(float(v)) for v in (*self.stationarity, self.dual_sign,
                                           self.primal_feasibility, self.complementarity))


def _min0(v):
    return v if v < 0 else v * 0


def kkt_residual(x: Sequence, lam, problem: PolyProblem) -> KKTResidual:
    """``(grad f - lam grad g, min(lam, 0), min(g, 0), lam g)`` at ``x``.

    Exact when ``x`` and ``lam`` are exact.
    """
    if len(problem.constraints) != 1:
        raise UnsupportedError("kkt_residual handles single-constraint problems only")
    n = problem.num_vars
    if len(x) != n:
        raise DimensionError(f"point has {len(x)} coordinates, problem has {n} variables")
    f, g = problem.objective, problem.constraints[0]
    stationarity = tuple(f.diff(i).eval(x) - lam * g.diff(i).eval(x) for i in range(n))
    gx = g.eval(x)
    return KKTResidual(stationarity, _min0(lam), _min0(gx), lam * gx)


def hessian(p: Polynomial) -> List[List[Polynomial]]:
    n = p.num_vars
    return [[p.diff(i).diff(j) for j in range(n)] for i in range(n)]


def _det(A: List[List[QSqrt2]]) -> QSqrt2:
    """Determinant by Gaussian elimination in the field Q(sqrt2)."""
    A = [row[:] for row in A]
    n = len(A)
    det = QSqrt2(1)
    for k in range(n):
        pivot = next((i for i in range(k, n) if A[i][k] != 0), None)
        if pivot is None:
            return QSqrt2(0)
        if pivot != k:
            A[k], A[pivot] = A[pivot], A[k]
            det = -det
        det = det * A[k][k]
        inv = A[k][k].invert()
        for i in range(k + 1, n):
            factor = A[i][k] * inv
            if factor != 0:
                for j in range(k, n):
                    A[i][j] = A[i][j] - factor * A[k][j]
    return det


def check_hessian_psd_constant(p: Polynomial) -> bool:
    """Exact PSD test of a constant Hessian via all principal minors."""
    if p.degree is not None and p.degree > 2:
        raise UnsupportedError(f"Hessian of a degree-{p.degree} polynomial is not constant")
    H = [[_exact(h.coefficient(MultiIndex.zero(p.num_vars))) for h in row] for row in hessian(p)]
    n = len(H)
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            if _det([[H[i][j] for j in idx] for i in idx]).sign() < 0:
                return False
    return True


@dataclass
class NonexistenceRow:
    order: int
    status: str
    bound: float
    gap: Optional[float]
    witness_feasible: Optional[bool]
    cap: Optional[QSqrt2]
    within_cap: Optional[bool]


@dataclass
class NonexistenceReport:
    kind: HierarchyKind
    reference: Optional[QSqrt2]
    rows: List[NonexistenceRow]
    tolerance: float

    @property
    def cap(self) -> Optional[QSqrt2]:
        caps = [row.cap for row in self.rows if row.cap is not None]
        return min(caps) if caps else None

    @property
    def consistent(self) -> bool:
        return all(row.within_cap is not False for row in self.rows)


def _witness_cap(problem: PolyProblem, kind: HierarchyKind, d: int, witness) -> Tuple[bool, Optional[QSqrt2]]:
    """Exact objective value of the witness if it is feasible at order ``d``."""
    if not check_moment_feasibility(witness, d, problem.constraints, problem.num_vars):
        return False, None
    objective = problem.objective
    if kind.r:
        p = premultiplier(problem.num_vars, kind.r)
        if _exact(riesz(p, witness)) != 1:
            return False, None
        objective = p * objective
    return True, _exact(riesz(objective, witness))


def certify_nonexistence_report(
    problem: PolyProblem,
    kind: HierarchyKind,
    orders: Sequence[int],
    reference=None,
    witness: Optional[Callable] = None,
    tolerance: float = 1e-6,
    solver_tolerance: float = 1e-8,
    backend: Optional[str] = None,
) -> NonexistenceReport:
    """Solve ``kind`` at each order and cap the bounds with an exact witness.

    ``witness`` is a moment sequence (mapping or callable) checked exactly
    for SDSOS-side feasibility.  DSOS moment constraints are implied by
    SDSOS ones, so for both hierarchies ``L_y(p^r f)`` bounds every dual
    value from above; no certificate with a larger ``lambda`` exists.
    """
    from .solver import Status, solve

    if not orders:
        raise ValueError("orders must be nonempty")
    ref = None if reference is None else _exact(reference)
    rows = []
    for d in orders:
        res = solve(build_relaxation(problem, d, kind), tolerance=solver_tolerance, backend=backend)
        if res.status != Status.OPTIMAL:
            raise SolverFailureError(f"order {d}: solver ended with {res.status.value}", order=d, status=res.status)
        feasible, cap = None, None
        if witness is not None and kind.hierarchy != Hierarchy.LASSERRE:
            feasible, cap = _witness_cap(problem, kind, d, witness)
        rows.append(
            NonexistenceRow(
                order=d,
                status=res.status.value,
                bound=res.dual_value,
                gap=None if ref is None else float(ref) - res.dual_value,
                witness_feasible=feasible,
                cap=cap,
                within_cap=None if cap is None else res.dual_value <= float(cap) + tolerance,
            )
        )
    return NonexistenceReport(kind, ref, rows, tolerance)
