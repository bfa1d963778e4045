from functools import cached_property
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from qmc_hyperinterp.core.records import format_number
from qmc_hyperinterp.exceptions import ConfigError
from qmc_hyperinterp.types import BasisKind, FrequencyVector

GammaRule = Literal["constant", "power", "explicit"]


class ProductWeights(BaseModel):
    """Smoothness alpha plus the product weight sequence gamma_j, j = 1, 2, ..."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(description="Smoothness parameter, > 1/2", gt=0.5)
    rule: GammaRule = Field(default="constant", description="Weight rule")
    c: float = Field(default=1.0, description="Scale of the constant/power rule")
    a: float = Field(default=0.0, description="Decay exponent of the power rule")
    values: tuple[float, ...] = Field(
        default=(), description="Explicit weights gamma_1, gamma_2, ..."
    )

    @model_validator(mode="after")
    def check_consistency(self):
        if self.rule == "explicit":
            if not self.values:
                raise ValueError("explicit weights need at least one value")
            if any(not 0.0 <= g <= 1.0 for g in self.values):
                raise ValueError("weights must lie in [0, 1]")
        else:
            if not 0.0 <= self.c <= 1.0:
                raise ValueError("weight scale c must lie in [0, 1]")
            if self.rule == "power" and self.a < 0:
                raise ValueError("power-law exponent must be non-negative")
        return self

    @classmethod
    def from_spec(cls, alpha: float, spec: str) -> "ProductWeights":
        """Parse `const:c`, `pow:c:a` or `list:g1,g2,...`"""
        kind, _, rest = spec.partition(":")
        try:
            if kind == "const":
                return cls(alpha=alpha, rule="constant", c=float(rest))
            if kind == "pow":
                c, a = rest.split(":")
                return cls(alpha=alpha, rule="power", c=float(c), a=float(a))
            if kind == "list":
                return cls(
                    alpha=alpha,
                    rule="explicit",
                    values=tuple(float(g) for g in rest.split(",")),
                )
        except ValueError as e:
            raise ConfigError(f"invalid weight spec {spec!r}: {e}") from e
        raise ConfigError(f"unknown weight rule in {spec!r}")

    @property
    def gamma_spec(self) -> str:
        if self.rule == "constant":
            return f"const:{format_number(self.c)}"
        if self.rule == "power":
            return f"pow:{format_number(self.c)}:{format_number(self.a)}"
        return "list:" + ",".join(format_number(g) for g in self.values)

    def gamma(self, j: int) -> float:
        """Weight of coordinate j (1-based)"""
        if j < 1:
            raise ValueError("coordinates are numbered from 1")
        if self.rule == "constant":
            return self.c
        if self.rule == "power":
            return self.c * float(j) ** (-self.a)
        if j > len(self.values):
            raise ConfigError(f"explicit weights define only {len(self.values)} coordinates")
        return self.values[j - 1]

    def gammas(self, d: int) -> np.ndarray:
        return np.array([self.gamma(j) for j in range(1, d + 1)], dtype=np.float64)

    @property
    def integer_alpha(self) -> int:
        """alpha as an int, for the Bernoulli-polynomial closed forms"""
        if not float(self.alpha).is_integer() or int(self.alpha) not in (1, 2, 3, 4):
            raise ConfigError(f"closed-form criteria need alpha in 1..4, got {self.alpha}")
        return int(self.alpha)


class Provenance(BaseModel):
    """How an index set was built"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["hyperbolic", "box", "explicit", "doubled", "difference"] = "explicit"
    M: float | None = Field(default=None, description="Threshold of a hyperbolic cross")
    T: int | None = Field(default=None, description="Half-width of a box")
    weights: ProductWeights | None = None
    b: int | None = Field(default=None, description="Walsh base")
    parent_size: int | None = None

    def label(self) -> str:
        if self.kind == "hyperbolic":
            return (
                f"hyperbolic(M={format_number(self.M)},alpha={format_number(self.weights.alpha)},"
                f"gamma={self.weights.gamma_spec})"
            )
        if self.kind == "box":
            return f"box(T={self.T})"
        if self.kind in ("doubled", "difference"):
            return f"{self.kind}(parent={self.parent_size})"
        return "explicit"


class IndexSet(BaseModel):
    """Finite, deduplicated, lexicographically sorted set of frequency vectors"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis_kind: BasisKind = "trig"
    members: np.ndarray = Field(description="Integer array of shape (|I|, d)")
    provenance: Provenance = Provenance()

    @field_validator("members", mode="before")
    @classmethod
    def normalise(cls, value):
        arr = np.asarray(value, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise ValueError("members must be a (count, d) array with d >= 1")
        if arr.shape[0] == 0:
            return arr
        return np.unique(arr, axis=0)

    @model_validator(mode="after")
    def check_consistency(self):
        if self.basis_kind == "walsh" and self.members.size and self.members.min() < 0:
            raise ValueError("walsh frequencies must be non-negative")
        if self.provenance.kind == "hyperbolic" and self.size:
            from .base import r_squared_array

            r2 = r_squared_array(
                self.members, self.provenance.weights, self.basis_kind, self.provenance.b or 2
            )
            if np.any(r2 > self.provenance.M * (1 + 1e-12)):
                raise ValueError("hyperbolic member outside its threshold")
        return self

    @property
    def size(self) -> int:
        return self.members.shape[0]

    @property
    def dim(self) -> int:
        return self.members.shape[1]

    def __len__(self) -> int:
        return self.size

    def vectors(self) -> list[FrequencyVector]:
        return [tuple(int(c) for c in row) for row in self.members]

    @cached_property
    def position(self) -> dict[FrequencyVector, int]:
        return {h: i for i, h in enumerate(self.vectors())}

    def __contains__(self, h) -> bool:
        return tuple(int(c) for c in h) in self.position

    @classmethod
    def from_vectors(
        cls, vectors, basis_kind: BasisKind = "trig", d: int | None = None
    ) -> "IndexSet":
        vectors = list(vectors)
        if not vectors:
            if d is None:
                raise ValueError("an empty index set needs an explicit dimension")
            return cls(basis_kind=basis_kind, members=np.zeros((0, d), dtype=np.int64))
        return cls(basis_kind=basis_kind, members=np.array(vectors, dtype=np.int64))
