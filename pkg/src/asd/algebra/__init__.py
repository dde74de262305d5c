"""Exact scalar, polynomial, series and matrix arithmetic."""
from .linalg import Matrix, char_poly, commutator, inverse, kernel_basis, rank, solve
from .mpoly import MPoly, format_scalar, scalar, var_key
from .parse import parse_fraction, parse_poly, parse_rational, parse_scalar
from .roots import AlgebraicTag, eigen_factors, rational_roots
from .series import ExpandableFraction, TruncatedSeries, expand_fraction, substitute

__all__ = [
    "AlgebraicTag", "ExpandableFraction", "MPoly", "Matrix", "TruncatedSeries",
    "char_poly", "commutator", "eigen_factors", "expand_fraction", "format_scalar",
    "inverse", "kernel_basis", "parse_fraction", "parse_poly", "parse_rational",
    "parse_scalar", "rank", "rational_roots", "scalar", "solve", "substitute", "var_key",
]
