from fractions import Fraction
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

BasisKind = Literal["trig", "walsh"]
CriterionKind = Literal["R", "S", "Rbreve"]

FrequencyVector = tuple[int, ...]


class PointSet(BaseModel):
    """Ordered points in [0,1)^d with exact coordinates numerators[n, j] / denominator"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    numerators: np.ndarray = Field(description="Integer array of shape (N, d)")
    denominator: int = Field(description="Common denominator of all coordinates")

    @field_validator("numerators", mode="before")
    @classmethod
    def as_int_array(cls, value):
        arr = np.asarray(value, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ValueError("numerators must be a 2-d array")
        return arr

    @model_validator(mode="after")
    def check_range(self):
        if self.denominator < 1:
            raise ValueError("denominator must be positive")
        if self.numerators.size and (
            self.numerators.min() < 0 or self.numerators.max() >= self.denominator
        ):
            raise ValueError("coordinates must lie in [0, 1)")
        return self

    @property
    def size(self) -> int:
        return self.numerators.shape[0]

    @property
    def dim(self) -> int:
        return self.numerators.shape[1]

    def coordinates(self) -> np.ndarray:
        return self.numerators / float(self.denominator)

    def point(self, n: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(k), self.denominator) for k in self.numerators[n])
