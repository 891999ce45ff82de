"""Moment/SOS hierarchies (Lasserre, SDSOS, DSOS and their r-variants) with
an embedded interior-point solver and exact Q(sqrt2) certificate checking."""

from .algebra import SQRT2, MultiIndex, Polynomial, QSqrt2, parse_polynomial, render_polynomial
from .moments import MomentSequence, SymMatrix, localizing_matrix, moment_matrix, riesz
from .relaxations import (
    BlockTag,
    ConicProgram,
    Hierarchy,
    HierarchyKind,
    PolyProblem,
    build_dsos,
    build_lasserre,
    build_r_variant,
    build_relaxation,
    build_sdsos,
    count_soc_constraints,
)
from .solver import SolveResult, Status, extract_minimizer, kkt_multiplier, solve

__version__ = "0.1.0"

__all__ = [
    "SQRT2",
    "MultiIndex",
    "Polynomial",
    "QSqrt2",
    "parse_polynomial",
    "render_polynomial",
    "MomentSequence",
    "SymMatrix",
    "moment_matrix",
    "localizing_matrix",
    "riesz",
    "BlockTag",
    "ConicProgram",
    "Hierarchy",
    "HierarchyKind",
    "PolyProblem",
    "build_lasserre",
    "build_sdsos",
    "build_dsos",
    "build_r_variant",
    "build_relaxation",
    "count_soc_constraints",
    "SolveResult",
    "Status",
    "solve",
    "extract_minimizer",
    "kkt_multiplier",
]
