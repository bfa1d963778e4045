from math import gcd
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from qmc_hyperinterp.types import CriterionKind


class Rank1Lattice(BaseModel):
    """Rank-1 lattice {n z / N mod 1 : n = 0..N-1}"""

    model_config = ConfigDict(frozen=True)

    N: int = Field(description="Modulus, number of points", ge=2)
    z: tuple[int, ...] = Field(description="Generating vector, entries in 1..N-1")

    @model_validator(mode="after")
    def check_consistency(self):
        if not self.z:
            raise ValueError("generating vector must have at least one component")
        if any(not 1 <= zj < self.N for zj in self.z):
            raise ValueError(f"generating vector entries must lie in 1..{self.N - 1}")
        return self

    @property
    def d(self) -> int:
        return len(self.z)

    def is_unit_vector(self) -> bool:
        """Every z_j coprime to N (the CBC search space)"""
        return all(gcd(zj, self.N) == 1 for zj in self.z)


class CriterionValue(BaseModel):
    """Value of a lattice quality criterion together with its parameters"""

    model_config = ConfigDict(frozen=True)

    kind: CriterionKind
    value: float = Field(description="Non-negative criterion value (not squared)", ge=0)
    n_points: int = Field(description="N for rank-1 lattices, b^m for polynomial lattices")
    d: int
    alpha: float
    gamma_spec: str


class EtaEstimate(BaseModel):
    """Spectral norm of the Gram deviation G - Id on an index set"""

    model_config = ConfigDict(frozen=True)

    eta: float = Field(ge=0)
    gram_dim: int
    converged: bool = True
    method: Literal["power", "eigh", "exact"] = "power"

    def satisfies_assumption(self) -> bool:
        return self.eta < 1.0
