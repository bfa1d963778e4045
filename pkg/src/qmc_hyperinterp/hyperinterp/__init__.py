from .base import (
    approximant_norm,
    coefficient_vector,
    conjugate_symmetry_defect,
    dense_grid,
    discrete_inner,
    dumps_approximant,
    evaluate,
    evaluate_float,
    evaluate_points,
    evaluate_real,
    l2_error_analytic,
    loads_approximant,
    qmc_hyperinterp,
    theorem33_bound_check,
)
from .schemas import Approximant, BoundReport, SampleSet

__all__ = [
    "Approximant",
    "BoundReport",
    "SampleSet",
    "approximant_norm",
    "coefficient_vector",
    "conjugate_symmetry_defect",
    "dense_grid",
    "discrete_inner",
    "dumps_approximant",
    "evaluate",
    "evaluate_float",
    "evaluate_points",
    "evaluate_real",
    "l2_error_analytic",
    "loads_approximant",
    "qmc_hyperinterp",
    "theorem33_bound_check",
]
