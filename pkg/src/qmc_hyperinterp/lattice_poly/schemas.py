import cmath

from pydantic import BaseModel, ConfigDict, Field, model_validator

from qmc_hyperinterp.field_poly import FieldPoly


class PolyLattice(BaseModel):
    """Rank-1 polynomial lattice with modulus p (deg m) and generating vector q"""

    model_config = ConfigDict(frozen=True)

    b: int = Field(description="Prime base")
    m: int = Field(description="Degree of the modulus; b^m points", ge=1)
    p: FieldPoly
    q: tuple[FieldPoly, ...]

    @model_validator(mode="after")
    def check_consistency(self):
        if self.p.b != self.b or any(qj.b != self.b for qj in self.q):
            raise ValueError("all polynomials must share the lattice base")
        if self.p.degree != self.m:
            raise ValueError(f"modulus has degree {self.p.degree}, expected {self.m}")
        if not self.q:
            raise ValueError("generating vector must have at least one component")
        if any(qj.degree >= self.m for qj in self.q):
            raise ValueError("generating polynomials must have degree < m")
        return self

    @property
    def d(self) -> int:
        return len(self.q)

    @property
    def n_points(self) -> int:
        return self.b**self.m


class WalshValue(BaseModel):
    """b-th root of unity exp(2 pi i exponent / b), kept as its integer exponent"""

    model_config = ConfigDict(frozen=True)

    exponent: int
    b: int

    @model_validator(mode="after")
    def reduce(self):
        object.__setattr__(self, "exponent", self.exponent % self.b)
        return self

    def __mul__(self, other: "WalshValue") -> "WalshValue":
        if other.b != self.b:
            raise ValueError("base mismatch")
        return WalshValue(exponent=self.exponent + other.exponent, b=self.b)

    @property
    def value(self) -> complex:
        if self.exponent == 0:
            return 1 + 0j
        if 2 * self.exponent == self.b:
            return -1 + 0j
        return cmath.exp(2j * cmath.pi * self.exponent / self.b)

    def __complex__(self) -> complex:
        return self.value
