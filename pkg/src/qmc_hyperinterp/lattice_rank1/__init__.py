from .base import (
    char_sum,
    char_sum_literal,
    cbc_reconstruction,
    estimate_eta,
    fibonacci_lattice,
    generate_points,
    gram_matrix,
    is_dual,
    lattice_eta,
    smallest_reconstructing_lattice,
    verify_reconstruction,
)
from .cbc import cbc_r, cbc_s
from .criteria import r_cbc_bound, r_criterion, s_cbc_bound, s_criterion
from .schemas import CriterionValue, EtaEstimate, Rank1Lattice

__all__ = [
    "CriterionValue",
    "EtaEstimate",
    "Rank1Lattice",
    "cbc_r",
    "cbc_reconstruction",
    "cbc_s",
    "char_sum",
    "char_sum_literal",
    "estimate_eta",
    "fibonacci_lattice",
    "generate_points",
    "gram_matrix",
    "is_dual",
    "lattice_eta",
    "r_cbc_bound",
    "r_criterion",
    "s_cbc_bound",
    "s_criterion",
    "smallest_reconstructing_lattice",
    "verify_reconstruction",
]
