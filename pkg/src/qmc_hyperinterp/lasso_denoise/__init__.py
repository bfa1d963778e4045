from .base import (
    add_noise,
    coordinate_descent_lasso,
    denoise_trials,
    design_matrix,
    gram_deviation,
    lasso_closed_form,
    lasso_objective,
    lasso_qmc_hyperinterp,
    noise_expectation_study,
    noise_rng,
    sample_for_mode,
    scan_lambda,
    shrink_approximant,
    soft_threshold,
    verify_lasso_optimality,
)
from .schemas import (
    DenoiseTrial,
    LassoConfig,
    NoiseSpec,
    NoiseStudyReport,
    OptimalityReport,
)

__all__ = [
    "DenoiseTrial",
    "LassoConfig",
    "NoiseSpec",
    "NoiseStudyReport",
    "OptimalityReport",
    "add_noise",
    "coordinate_descent_lasso",
    "denoise_trials",
    "design_matrix",
    "gram_deviation",
    "lasso_closed_form",
    "lasso_objective",
    "lasso_qmc_hyperinterp",
    "noise_expectation_study",
    "noise_rng",
    "sample_for_mode",
    "scan_lambda",
    "shrink_approximant",
    "soft_threshold",
    "verify_lasso_optimality",
]
