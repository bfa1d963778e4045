from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from qmc_hyperinterp.hyperinterp import SampleSet
from qmc_hyperinterp.types import BasisKind, PointSet
from qmc_hyperinterp.weights_index import IndexSet

BESSEL_TOL = 1e-9


class TestFunction(BaseModel):
    """A product test function with a pointwise evaluator and a coefficient oracle"""

    __test__ = False
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str = Field(description="Registry key")
    basis_kind: BasisKind = Field(description="Basis its oracle coefficients refer to")
    description: str = ""
    evaluator: Callable[[PointSet], np.ndarray] = Field(
        description="Values at every point of an exact point set"
    )
    coefficient_oracle: Callable[[IndexSet], np.ndarray] = Field(
        description="Exact or quadrature coefficients aligned to I.members"
    )
    norm_squared: Callable[[int], float] = Field(description="||f||_2^2 in dimension d")

    def sample(self, points: PointSet) -> SampleSet:
        return SampleSet(points=points, values=self.evaluator(points))

    def coefficients(self, I: IndexSet) -> np.ndarray:
        if I.basis_kind != self.basis_kind:
            raise ValueError(f"{self.name} has {self.basis_kind} coefficients, not {I.basis_kind}")
        return self.coefficient_oracle(I)

    def bessel_gap(self, I: IndexSet) -> float:
        """||f||^2 - sum_{h in I} |fhat(h)|^2, non-negative up to BESSEL_TOL"""
        return self.norm_squared(I.dim) - float(np.sum(np.abs(self.coefficients(I)) ** 2))
