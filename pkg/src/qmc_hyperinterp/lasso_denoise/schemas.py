import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

ShrinkRule = Literal["modulus", "componentwise"]
PointMode = Literal["fresh", "same"]


class NoiseSpec(BaseModel):
    """
    Gaussian noise level, given either as a signal-to-noise ratio in dB or as
    an absolute standard deviation. snr_db = inf means no noise.
    """

    model_config = ConfigDict(frozen=True)

    snr_db: float | None = Field(default=None, description="Target SNR in decibels")
    sigma: float | None = Field(default=None, description="Absolute standard deviation", ge=0)
    seed: int = Field(default=0, description="Seed of the counter-based generator", ge=0)

    @model_validator(mode="after")
    def check_consistency(self):
        if (self.snr_db is None) == (self.sigma is None):
            raise ValueError("give exactly one of snr_db and sigma")
        return self

    @property
    def is_noiseless(self) -> bool:
        return self.sigma == 0 or self.snr_db == math.inf

    def resolve_sigma(self, clean: np.ndarray) -> float:
        """sigma = rms(clean) / 10^{snr_db / 20}"""
        if self.sigma is not None:
            return self.sigma
        if self.snr_db == math.inf:
            return 0.0
        rms = math.sqrt(float(np.mean(np.abs(clean) ** 2)))
        return rms / 10 ** (self.snr_db / 20)

    def for_trial(self, trial: int) -> "NoiseSpec":
        return self.model_copy(update={"seed": self.seed + trial})


class LassoConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    lam: float = Field(description="Regularisation parameter lambda", ge=0)
    complex_rule: ShrinkRule = Field(
        default="modulus", description="Shrink |a| (modulus) or Re/Im separately"
    )


class OptimalityReport(BaseModel):
    """Certificate that the soft-thresholded coefficients minimise the Lasso objective"""

    lam: float
    gram_deviation: float
    objective: float
    min_perturbed_objective: float
    perturbations: int
    perturbation_ok: bool
    cd_max_difference: float
    cd_iterations: int
    cd_agrees: bool

    @property
    def certified(self) -> bool:
        return self.perturbation_ok and self.cd_agrees


class NoiseStudyReport(BaseModel):
    sigma: float
    trials: int
    seed: int
    n_points: int
    index_size: int
    mean_error: float = Field(description="Mean of ||Q f_eps - Q f||")
    mean_square_error: float
    bound: float = Field(description="sigma sqrt(|I| / N)")

    @property
    def ratio_mean(self) -> float:
        return self.mean_error / self.bound if self.bound else 0.0

    @property
    def ratio_mean_square(self) -> float:
        return self.mean_square_error / self.bound**2 if self.bound else 0.0


class DenoiseTrial(BaseModel):
    """One row of a denoising report"""

    trial: int
    seed: int
    l2_noisy: float
    l2_lasso: float
    bound: float
    lam: float
    sigma: float
    nonzero: int = Field(description="Nonzero Lasso coefficients")
