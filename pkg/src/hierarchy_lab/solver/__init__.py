"""Interior-point solving of relaxations and post-processing of the solution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..algebra import MultiIndex, Polynomial
from ..errors import MissingDualBlockError, SolverFailureError
from ..moments import MomentSequence, SymMatrix
from ..relaxations import BlockTag, ConicProgram
from . import kernels
from .ipm import DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE, IPMResult, Status, solve_standard
from .standard_form import MatrixBlock, StandardForm, standard_form

__all__ = [
    "Status",
    "SolveResult",
    "solve",
    "extract_minimizer",
    "multiplier_grams",
    "gram_polynomial",
    "kkt_multiplier_from_dual",
    "kkt_multiplier",
    "REFINE_TOLERANCE",
    "moment_matrix_of",
    "StandardForm",
    "MatrixBlock",
    "standard_form",
    "solve_standard",
    "kernels",
    "DEFAULT_TOLERANCE",
    "DEFAULT_MAX_ITERS",
]


# sigma_i is fixed only to about sqrt(gap): at the optimum the moment matrix is
# rank one, so perturbing sigma_i along the constraint is first-order free
REFINE_TOLERANCE = 1e-12


@dataclass
class SolveResult:
    status: Status
    primal_value: float
    dual_value: float
    y: Optional[MomentSequence]
    dual_blocks: Tuple[np.ndarray, ...]
    iterations: int
    residuals: Dict[str, float]
    z: np.ndarray
    tolerance: float

    @property
    def bound(self) -> float:
        """Lower bound delivered by the relaxation (the dual objective)."""
        return self.dual_value

    @property
    def ok(self) -> bool:
        return self.status == Status.OPTIMAL


def solve(
    program: Union[ConicProgram, StandardForm],
    tolerance: float = DEFAULT_TOLERANCE,
    max_iters: int = DEFAULT_MAX_ITERS,
    backend: Optional[str] = None,
) -> SolveResult:
    """Solve a relaxation (or a raw standard-form program).

    For a :class:`ConicProgram` the moment vector is returned as a float
    :class:`MomentSequence` and ``dual_blocks[i]`` is the dual matrix of
    ``program.blocks[i]`` (``1x1`` for linear rows).
    """
    cp = program if isinstance(program, ConicProgram) else None
    sf = standard_form(cp) if cp is not None else program
    res: IPMResult = solve_standard(sf, tolerance=tolerance, max_iters=max_iters, backend=backend)
    if cp is None:
        duals = tuple(res.X) + tuple(np.array([[v]]) for v in res.x)
        return SolveResult(res.status, res.primal_value, res.dual_value, None, duals,
                           res.iterations, res.residuals, res.z, tolerance)
    y = MomentSequence.from_vector(sf.lift(res.z), cp.num_vars, 2 * cp.order)
    duals = []
    for kind, idx in sf.origin:
        duals.append(res.X[idx] if kind == "mat" else np.array([[res.x[idx]]]))
    return SolveResult(res.status, res.primal_value, res.dual_value, y, tuple(duals),
                       res.iterations, res.residuals, res.z, tolerance)


def moment_matrix_of(result: SolveResult, order: int) -> SymMatrix:
    """Float moment matrix ``M_order(y)`` of a solved relaxation."""
    from ..moments import moment_matrix

    return moment_matrix(result.y, order)


def extract_minimizer(M: Union[SymMatrix, np.ndarray], tol: float = 1e-6,
                      row_labels: Optional[Sequence[MultiIndex]] = None) -> Optional[Tuple[float, ...]]:
    """Point read off a numerically rank-one moment matrix, else ``None``.

    Rank one means ``lambda_2 / lambda_1 < tol``; the point is the degree-one
    part of the leading eigenvector scaled so its constant entry is 1.
    """
    if isinstance(M, SymMatrix):
        labels = M.row_labels
        A = M.to_numpy()
    else:
        A = np.asarray(M, dtype=float)
        labels = row_labels
        if labels is None:
            raise ValueError("row_labels required for a bare array")
    A = 0.5 * (A + A.T)
    vals, vecs = np.linalg.eigh(A)
    top = vals[-1]
    if top <= 0:
        return None
    second = vals[-2] if len(vals) > 1 else 0.0
    if second / top >= tol:
        return None
    v = vecs[:, -1] * np.sqrt(top)
    n = len(labels[0])
    zero = labels.index(MultiIndex.zero(n))
    if abs(v[zero]) <= tol:
        return None
    v = v / v[zero]
    point = []
    for i in range(n):
        point.append(float(v[labels.index(MultiIndex.unit(i, n))]))
    return tuple(point)


def multiplier_grams(program: ConicProgram, result: SolveResult) -> Dict[int, Tuple[Tuple[MultiIndex, ...], np.ndarray]]:
    """Gram matrix of each multiplier, keyed by source matrix.

    Key ``0`` is ``sigma_0`` (moment matrix); key ``i`` is ``sigma_i`` of
    constraint ``g_i``.  2x2 and linear dual blocks are summed into the Gram
    matrix of their source, e.g. a row ``B_ii + 2 B_ij + B_jj >= 0`` with
    multiplier ``w`` adds ``w (e_i + e_j)(e_i + e_j)^T``.
    """
    grams = {}
    for sid, src in enumerate(program.sources):
        grams[sid] = (src.row_labels, np.zeros((src.dim, src.dim)))
    for block, Xb in zip(program.blocks, result.dual_blocks):
        G = grams[block.source][1]
        if block.tag == BlockTag.PSD:
            G += Xb
        elif block.tag == BlockTag.SOC2X2:
            i, j = block.rows
            G[np.ix_([i, j], [i, j])] += Xb
        else:
            w = float(Xb[0, 0])
            if len(block.rows) == 1:
                i = block.rows[0]
                G[i, i] += w
            else:
                i, j = block.rows
                G[i, i] += w
                G[j, j] += w
                G[i, j] += block.sign * w
                G[j, i] += block.sign * w
    out = {}
    for sid, src in enumerate(program.sources):
        key = 0 if src.constraint is None else src.constraint + 1
        out[key] = grams[sid]
    return out


def gram_polynomial(labels: Sequence[MultiIndex], G: np.ndarray) -> Polynomial:
    """``m(x)^T G m(x)`` for the monomial vector ``m`` given by ``labels``."""
    n = len(labels[0])
    terms: Dict[MultiIndex, float] = {}
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            key = a + b
            terms[key] = terms.get(key, 0.0) + float(G[i, j])
    return Polynomial(terms, n)


def kkt_multiplier_from_dual(grams: Mapping[int, Tuple[Sequence[MultiIndex], np.ndarray]],
                             x: Sequence[float], constraint: int = 1) -> float:
    """Evaluate the multiplier ``sigma_constraint`` at ``x``."""
    if constraint not in grams:
        raise MissingDualBlockError(f"no dual block for constraint {constraint}")
    labels, G = grams[constraint]
    mono = np.array([np.prod([xi**e for xi, e in zip(x, a)]) for a in labels], dtype=float)
    return float(mono @ G @ mono)


def kkt_multiplier(program: ConicProgram, result: SolveResult, x: Sequence[float], constraint: int = 1,
                   refine_tolerance: float = REFINE_TOLERANCE, backend: Optional[str] = None) -> float:
    """KKT multiplier ``sigma_constraint(x)``, re-solving at ``refine_tolerance`` first
    when ``result`` was obtained at a looser tolerance."""
    if result.tolerance > refine_tolerance:
        refined = solve(program, tolerance=refine_tolerance, backend=backend)
        if refined.status == Status.OPTIMAL:
            result = refined
        elif result.status != Status.OPTIMAL:
            raise SolverFailureError(f"refinement solve ended with {refined.status.value}", status=refined.status)
    return kkt_multiplier_from_dual(multiplier_grams(program, result), x, constraint)
