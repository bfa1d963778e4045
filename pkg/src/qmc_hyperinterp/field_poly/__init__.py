from .base import (
    fibonacci_poly,
    is_irreducible,
    laurent_digits,
    nu_m,
    poly_mul_mod,
    smallest_irreducible,
    tr_m,
)
from .schemas import ZERO_DEGREE, FieldPoly, LaurentFraction

__all__ = [
    "ZERO_DEGREE",
    "FieldPoly",
    "LaurentFraction",
    "fibonacci_poly",
    "is_irreducible",
    "laurent_digits",
    "nu_m",
    "poly_mul_mod",
    "smallest_irreducible",
    "tr_m",
]
