from .base import (
    equidistant_lattice,
    fibonacci_poly_lattice,
    generate_poly_points,
    is_dual_poly,
    poly_residues,
    verify_poly_reconstruction,
    wal,
    wal_multi,
    walsh_char_sum,
    walsh_char_sum_literal,
)
from .cbc import cbc_poly
from .criteria import (
    phi_alpha,
    phi_alpha_printed,
    phi_series_oracle,
    phi_table,
    rbreve2_dual_oracle,
    rbreve2_tail_bound,
    rbreve_cbc_bound,
    rbreve_criterion,
)
from .schemas import PolyLattice, WalshValue

__all__ = [
    "PolyLattice",
    "WalshValue",
    "cbc_poly",
    "equidistant_lattice",
    "fibonacci_poly_lattice",
    "generate_poly_points",
    "is_dual_poly",
    "phi_alpha",
    "phi_alpha_printed",
    "phi_series_oracle",
    "phi_table",
    "poly_residues",
    "rbreve2_dual_oracle",
    "rbreve2_tail_bound",
    "rbreve_cbc_bound",
    "rbreve_criterion",
    "verify_poly_reconstruction",
    "wal",
    "wal_multi",
    "walsh_char_sum",
    "walsh_char_sum_literal",
]
