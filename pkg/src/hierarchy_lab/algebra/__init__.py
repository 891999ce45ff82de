"""Scalars, multi-indices and sparse polynomials."""

from .multiindex import MultiIndex, monomials_of_degree, monomials_up_to, num_monomials
from .polynomial import Polynomial, add, evaluate, mul, scale
from .qsqrt2 import SQRT2, QSqrt2, to_float
from .text import default_names, parse_polynomial, parse_scalar, render_polynomial, render_scalar

__all__ = [
    "MultiIndex",
    "monomials_up_to",
    "monomials_of_degree",
    "num_monomials",
    "Polynomial",
    "add",
    "mul",
    "scale",
    "evaluate",
    "QSqrt2",
    "SQRT2",
    "to_float",
    "default_names",
    "parse_polynomial",
    "parse_scalar",
    "render_polynomial",
    "render_scalar",
]
