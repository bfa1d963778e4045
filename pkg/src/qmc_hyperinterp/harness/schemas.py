from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from qmc_hyperinterp.types import BasisKind

Command = Literal["construct", "points", "convergence", "timing", "denoise", "scan-lambda"]
ConstructKind = Literal["R", "S", "recon", "poly"]
LatticeKind = Literal["rank1", "poly"]

DEFAULT_LADDER = (127, 251, 509, 1021, 2039, 4093)

PRESETS: dict[str, dict] = {
    "fig1-lattice": {
        "command": "points",
        "lattice": "rank1",
        "fibonacci": True,
        "n": 89,
        "d": 2,
    },
    "fig1-poly": {
        "command": "points",
        "lattice": "poly",
        "fibonacci": True,
        "m": 7,
        "b": 2,
        "d": 2,
    },
    "fig2": {
        "command": "timing",
        "d": 4,
        "alpha": 2.0,
        "gamma": "pow:1:2",
        "tau": 1.9,
        "m_ladder": (4.0, 8.0, 16.0, 32.0),
        "repetitions": 3,
    },
    # convergence index sets are {h : r^2(h) <= N^tau}, tau = 3.4, with N the lattice size;
    # the exponent is applied once, not squared into N^(3.4 * 3.4)
    "fig3": {
        "command": "convergence",
        "function": "kv",
        "d": 2,
        "alpha": 4.0,
        "gamma": "pow:1:3.5",
        "tau": 3.4,
        "ladder": DEFAULT_LADDER,
    },
    "fig3-weighted": {
        "command": "convergence",
        "function": "kv-weighted",
        "d": 2,
        "alpha": 4.0,
        "gamma": "pow:0.1:4",
        "tau": 3.4,
        "ladder": DEFAULT_LADDER,
    },
    "fig4": {
        "command": "denoise",
        "function": "kv",
        "basis": "trig",
        "d": 2,
        "n": 4093,
        "box": 22,
        "lam": 0.016,
        "snr_db": 15.0,
        "trials": 50,
    },
    "fig5-square": {
        "command": "denoise",
        "function": "square-wave",
        "basis": "walsh",
        "lattice": "poly",
        "d": 1,
        "b": 2,
        "m": 12,
        "walsh_size": 2048,
        "lam": 0.011,
        "snr_db": 15.0,
        "trials": 50,
    },
}

_TUPLE_FIELDS = ("ladder", "m_ladder", "lambdas")


class ExperimentConfig(BaseModel):
    """Resolved parameters of one CLI run"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    preset: str | None = None
    d: int = Field(default=2, ge=1)
    alpha: float = Field(default=2.0, gt=0.5)
    gamma: str = Field(default="const:1", description="Weight spec const:c | pow:c:a | list:...")
    kind: ConstructKind = "R"
    lattice: LatticeKind = "rank1"
    fibonacci: bool = False
    n: int | None = Field(default=None, description="Number of rank-1 lattice points")
    m: int | None = Field(default=None, description="b^m polynomial lattice points")
    b: int = Field(default=2, ge=2)
    basis: BasisKind = "trig"
    threshold: float | None = Field(default=None, description="Hyperbolic cross threshold M")
    tau: float | None = Field(
        default=None, description="Hyperbolic threshold N^tau (M^tau for timing)"
    )
    box: int | None = Field(default=None, description="Box index set max|h_j| <= box")
    walsh_size: int | None = Field(default=None, description="Walsh index set {0..walsh_size-1}")
    function: str = "kv"
    ladder: tuple[int, ...] = DEFAULT_LADDER
    m_ladder: tuple[float, ...] = (4.0, 8.0, 16.0, 32.0)
    repetitions: int = Field(default=3, ge=1)
    lam: float = Field(default=0.0, ge=0)
    lambdas: tuple[float, ...] = ()
    snr_db: float = 15.0
    seed: int = Field(default=0, ge=0)
    trials: int = Field(default=1, ge=1)
    fractions: bool = False
    output: Path | None = None

    @field_validator(*_TUPLE_FIELDS, mode="before")
    @classmethod
    def split_lists(cls, value):
        if isinstance(value, str):
            return tuple(v.strip() for v in value.split(",") if v.strip())
        return value

    @field_validator("function", mode="before")
    @classmethod
    def dashed_name(cls, value):
        return value.replace("_", "-") if isinstance(value, str) else value

    @model_validator(mode="after")
    def check_command_requirements(self):
        if self.command == "timing" and self.repetitions < 3:
            raise ValueError("timing medians need at least 3 repetitions")
        if self.uses_poly_lattice and self.m is None:
            raise ValueError("polynomial lattice runs need m")
        if self.command == "scan-lambda" and not self.lambdas:
            raise ValueError("scan-lambda needs a lambdas grid")
        return self

    @property
    def uses_poly_lattice(self) -> bool:
        if self.command == "construct":
            return self.kind == "poly"
        if self.command == "points":
            return self.lattice == "poly"
        if self.command in ("denoise", "scan-lambda"):
            return self.basis == "walsh"
        return False

    def resolved_items(self) -> list[tuple[str, str]]:
        """key=value pairs of every field in declaration order, output excluded"""
        items = []
        for key, value in self.model_dump(exclude={"output"}).items():
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            items.append((key, "" if value is None else str(value)))
        return items


class ConstructReport(BaseModel):
    """Outcome of a `construct` run"""

    kind: ConstructKind
    n_points: int
    d: int
    vector: tuple[int, ...] = Field(description="z, or the integer encodings of q_1..q_d")
    criterion: float | None = Field(
        default=None, description="R, S or R-breve; eta for reconstruction runs"
    )
    cached: bool = False
    index_size: int | None = None
    success: bool = True
