from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sympy import isprime

ZERO_DEGREE = -1


def trim(coeffs: tuple[int, ...]) -> tuple[int, ...]:
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


class FieldPoly(BaseModel):
    """Polynomial over the prime field F_b, coefficients lowest degree first"""

    model_config = ConfigDict(frozen=True)

    b: int = Field(description="Prime base of the field")
    coeffs: tuple[int, ...] = Field(default=(), description="a_0, a_1, ..., a_deg")

    @field_validator("b")
    @classmethod
    def prime_base(cls, b: int) -> int:
        if not isprime(b):
            raise ValueError(f"base must be prime, got {b}")
        return b

    @model_validator(mode="before")
    @classmethod
    def reduce(cls, data):
        b = data.get("b") if isinstance(data, dict) else None
        if isinstance(b, int) and b >= 2 and "coeffs" in data:
            data = {**data, "coeffs": trim(tuple(int(c) % b for c in data["coeffs"]))}
        return data

    @classmethod
    def zero(cls, b: int) -> "FieldPoly":
        return cls(b=b, coeffs=())

    @classmethod
    def one(cls, b: int) -> "FieldPoly":
        return cls(b=b, coeffs=(1,))

    @classmethod
    def monomial(cls, k: int, b: int) -> "FieldPoly":
        return cls(b=b, coeffs=(0,) * k + (1,))

    @classmethod
    def from_int(cls, n: int, b: int) -> "FieldPoly":
        """Digits of n in base b become the coefficients"""
        digits = []
        while n:
            n, r = divmod(n, b)
            digits.append(r)
        return cls(b=b, coeffs=tuple(digits))

    def to_int(self) -> int:
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.b + c
        return n

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "FieldPoly") -> None:
        if other.b != self.b:
            raise ValueError(f"base mismatch: {self.b} vs {other.b}")

    def __add__(self, other: "FieldPoly") -> "FieldPoly":
        from .base import add

        self._check(other)
        return FieldPoly(b=self.b, coeffs=add(self.coeffs, other.coeffs, self.b))

    def __sub__(self, other: "FieldPoly") -> "FieldPoly":
        from .base import sub

        self._check(other)
        return FieldPoly(b=self.b, coeffs=sub(self.coeffs, other.coeffs, self.b))

    def __mul__(self, other: "FieldPoly") -> "FieldPoly":
        from .base import mul

        self._check(other)
        return FieldPoly(b=self.b, coeffs=mul(self.coeffs, other.coeffs, self.b))

    def __divmod__(self, other: "FieldPoly") -> tuple["FieldPoly", "FieldPoly"]:
        from .base import divmod_coeffs

        self._check(other)
        q, r = divmod_coeffs(self.coeffs, other.coeffs, self.b)
        return FieldPoly(b=self.b, coeffs=q), FieldPoly(b=self.b, coeffs=r)

    def __mod__(self, other: "FieldPoly") -> "FieldPoly":
        return divmod(self, other)[1]

    def __floordiv__(self, other: "FieldPoly") -> "FieldPoly":
        return divmod(self, other)[0]

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            coef = str(c) if (c != 1 or k == 0) else ""
            terms.append(coef + mono)
        return "+".join(terms)


class LaurentFraction(BaseModel):
    """numerator / denominator as a formal Laurent series in x^{-1}"""

    model_config = ConfigDict(frozen=True)

    numerator: FieldPoly
    denominator: FieldPoly

    @model_validator(mode="after")
    def check_consistency(self):
        if self.denominator.is_zero():
            raise ValueError("zero denominator")
        if self.numerator.b != self.denominator.b:
            raise ValueError("base mismatch")
        if self.numerator.degree >= self.denominator.degree:
            object.__setattr__(self, "numerator", self.numerator % self.denominator)
        return self
