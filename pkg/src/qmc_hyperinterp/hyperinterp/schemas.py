from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from qmc_hyperinterp.types import BasisKind, FrequencyVector, PointSet
from qmc_hyperinterp.weights_index import IndexSet

ApproximantSource = Literal["qmc", "lasso", "classical"]


class SampleSet(BaseModel):
    """Samples f(x_n) on an ordered point set"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: PointSet
    values: np.ndarray = Field(description="One sample per point, real or complex")

    @field_validator("values", mode="before")
    @classmethod
    def as_array(cls, value):
        arr = np.asarray(value)
        if not np.iscomplexobj(arr):
            arr = arr.astype(np.float64)
        return arr.reshape(-1)

    @model_validator(mode="after")
    def check_consistency(self):
        if self.points.size < 1:
            raise ValueError("a sample set needs at least one point")
        if self.values.shape[0] != self.points.size:
            raise ValueError(
                f"{self.values.shape[0]} values for {self.points.size} points"
            )
        return self

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def dim(self) -> int:
        return self.points.dim


class Approximant(BaseModel):
    """sum_{h in I} c_h q_h with coefficients aligned to the rows of I.members"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis_kind: BasisKind = "trig"
    index_set: IndexSet
    coefficients: np.ndarray
    source: ApproximantSource = "qmc"
    lam: float | None = Field(default=None, description="Lasso regularisation, if any")
    b: int = Field(default=2, description="Walsh base")

    @field_validator("coefficients", mode="before")
    @classmethod
    def as_complex(cls, value):
        return np.asarray(value, dtype=np.complex128).reshape(-1)

    @model_validator(mode="after")
    def check_consistency(self):
        if self.coefficients.shape[0] != self.index_set.size:
            raise ValueError(
                f"{self.coefficients.shape[0]} coefficients for |I| = {self.index_set.size}"
            )
        if self.index_set.basis_kind != self.basis_kind:
            raise ValueError("index set and approximant disagree on the basis")
        if self.source == "lasso" and self.lam is None:
            raise ValueError("lasso approximants record their lambda")
        return self

    @property
    def provenance(self) -> str:
        return f"lasso({self.lam!r})" if self.source == "lasso" else self.source

    def coefficient(self, h: FrequencyVector) -> complex:
        """c_h, zero outside I"""
        i = self.index_set.position.get(tuple(int(c) for c in h))
        return 0j if i is None else complex(self.coefficients[i])

    def as_dict(self) -> dict[FrequencyVector, complex]:
        return {h: complex(c) for h, c in zip(self.index_set.vectors(), self.coefficients)}

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.coefficients))


class BoundReport(BaseModel):
    """Advisory check of ||Q f|| <= sqrt(1 + eta) max|f| and the aliasing term"""

    model_config = ConfigDict(frozen=True)

    approximant_norm: float
    sup_norm: float
    eta: float
    rhs: float
    margin: float
    holds: bool
    advisory: bool = True
    proxy_error: float | None = Field(
        default=None, description="max |f - p*| on the grid, the proxy for E_I(f)"
    )
    aliasing: float | None = Field(default=None, description="||Q p* - p*||")
    error_bound: float | None = Field(
        default=None, description="(sqrt(1+eta) + 1) E + ||Q p* - p*||"
    )
