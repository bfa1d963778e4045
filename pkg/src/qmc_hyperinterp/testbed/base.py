"""
Test functions for the experiments.

kv: the product of the univariate factor
    g(x) = c (4 + sgn(x - 1/2) (sin^3(2 pi x) + sin^4(2 pi x))),
    c = 8 sqrt(6) sqrt(pi) / sqrt(6369 pi - 4096),
normalised so that ||g||_2 = 1. g is analytic on both halves of [0, 1], so its
Fourier coefficients come from oscillatory quadrature on [0, 1/2] and [1/2, 1].

kv-weighted: prod_j (1 + omega_j g(x_j)).

square-wave: a +-1 pattern on the 16 dyadic cells of depth 4, with exact
Walsh coefficients.
"""

import math
from collections.abc import Sequence
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
from loguru import logger
from scipy.integrate import quad

from qmc_hyperinterp.core.basis import unit_roots, walsh_exponents
from qmc_hyperinterp.core.cache import get_cache
from qmc_hyperinterp.core.records import CoefficientFile
from qmc_hyperinterp.exceptions import ConfigError, ConvergenceError
from qmc_hyperinterp.settings import settings
from qmc_hyperinterp.types import PointSet
from qmc_hyperinterp.weights_index import IndexSet

from .schemas import TestFunction

KV_SCALE = 8 * math.sqrt(6) * math.sqrt(math.pi) / math.sqrt(6369 * math.pi - 4096)
QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-12
QUAD_ERROR_LIMIT = 1e-10

SQUARE_WAVE_DEPTH = 4
SQUARE_WAVE_PATTERN = (1, 1, 1, -1, -1, 1, 1, 1, 1, 1, -1, -1, -1, 1, 1, 1)

DEFAULT_OMEGA_DECAY = 8.0


def _sgn_half(x):
    """sgn(x - 1/2) with sgn(0) = 0, exact for Fractions"""
    if isinstance(x, Fraction):
        return (x > Fraction(1, 2)) - (x < Fraction(1, 2))
    return np.sign(np.asarray(x, dtype=np.float64) - 0.5)


def kv_factor(x):
    """c (4 + sgn(x - 1/2) (sin^3(2 pi x) + sin^4(2 pi x)))"""
    arg = float(x) if isinstance(x, Fraction) else x
    s = np.sin(2 * np.pi * np.asarray(arg, dtype=np.float64))
    value = KV_SCALE * (4 + _sgn_half(x) * (s**3 + s**4))
    return float(value) if np.ndim(value) == 0 else value


def _kv_columns(points: PointSet) -> np.ndarray:
    """kv_factor at every coordinate, the sign taken from the exact numerators"""
    sign = np.sign(2 * points.numerators - points.denominator)
    s = np.sin(2 * np.pi * points.coordinates())
    return KV_SCALE * (4 + sign * (s**3 + s**4))


def kv_values(points: PointSet) -> np.ndarray:
    return np.prod(_kv_columns(points), axis=1)


def _half_integral(sign: int, lo: float, hi: float, h: int, weight: str | None) -> float:
    def integrand(x: float) -> float:
        s = math.sin(2 * math.pi * x)
        return KV_SCALE * (4 + sign * (s**3 + s**4))

    kwargs = {"epsabs": QUAD_EPSABS, "epsrel": QUAD_EPSREL, "limit": 200}
    if weight is None:
        value, err = quad(integrand, lo, hi, **kwargs)
    else:
        value, err = quad(integrand, lo, hi, weight=weight, wvar=2 * math.pi * h, **kwargs)
    if err > QUAD_ERROR_LIMIT:
        raise ConvergenceError(f"quadrature for h={h} reports error {err:.2e}")
    return value


@lru_cache(maxsize=None)
def _kv_fourier_nonnegative(h: int) -> complex:
    key = f"kv_fourier:{h}"
    cache = get_cache()
    cached = cache.get(key)
    if cached is not None:
        return complex(cached)
    if h == 0:
        left = _half_integral(-1, 0.0, 0.5, 0, None)
        value = complex(left + _half_integral(1, 0.5, 1.0, 0, None))
    else:
        re = _half_integral(-1, 0.0, 0.5, h, "cos") + _half_integral(1, 0.5, 1.0, h, "cos")
        im = _half_integral(-1, 0.0, 0.5, h, "sin") + _half_integral(1, 0.5, 1.0, h, "sin")
        value = complex(re, -im)
    cache.set(key, value)
    return value


def kv_fourier(h: int) -> complex:
    """int_0^1 g(x) exp(-2 pi i h x) dx; negative h by conjugation"""
    h = int(h)
    value = _kv_fourier_nonnegative(abs(h))
    return value.conjugate() if h < 0 else value


def kv_fourier_table(frequencies: np.ndarray) -> dict[int, complex]:
    return {int(h): kv_fourier(int(h)) for h in np.unique(np.asarray(frequencies))}


def kv_coefficients(I: IndexSet) -> np.ndarray:
    """Products of univariate coefficients over the coordinates"""
    if I.size == 0:
        return np.zeros(0, dtype=np.complex128)
    table = kv_fourier_table(I.members)
    lookup = np.vectorize(lambda h: table[int(h)], otypes=[np.complex128])
    return np.prod(lookup(I.members), axis=1)


def power_omega(d: int, decay: float = DEFAULT_OMEGA_DECAY, scale: float = 1.0) -> np.ndarray:
    """omega_j = scale * j^{-decay}"""
    return scale * np.arange(1, d + 1, dtype=np.float64) ** (-decay)


def _omega_for(d: int, omega: Sequence[float] | None) -> np.ndarray:
    if omega is None:
        return power_omega(d)
    omega = np.asarray(omega, dtype=np.float64)
    if omega.size < d:
        raise ConfigError(f"{omega.size} omega values for d={d}")
    return omega[:d]


def f_weighted(x: Sequence, omega: Sequence[float] | None = None) -> float:
    """prod_j (1 + omega_j g(x_j)) at one point"""
    w = _omega_for(len(x), omega)
    return float(np.prod([1.0 + wj * kv_factor(xj) for wj, xj in zip(w, x)]))


def f_weighted_values(points: PointSet, omega: Sequence[float] | None = None) -> np.ndarray:
    w = _omega_for(points.dim, omega)
    return np.prod(1.0 + w * _kv_columns(points), axis=1)


def f_weighted_coefficients(I: IndexSet, omega: Sequence[float] | None = None) -> np.ndarray:
    """prod_j ([h_j = 0] + omega_j ghat(h_j))"""
    if I.size == 0:
        return np.zeros(0, dtype=np.complex128)
    w = _omega_for(I.dim, omega)
    table = kv_fourier_table(I.members)
    lookup = np.vectorize(lambda h: table[int(h)], otypes=[np.complex128])
    factors = (I.members == 0) + w * lookup(I.members)
    return np.prod(factors, axis=1)


def f_weighted_norm_sq(d: int, omega: Sequence[float] | None = None) -> float:
    """prod_j (1 + 2 omega_j ghat(0) + omega_j^2), using ||g|| = 1"""
    w = _omega_for(d, omega)
    g0 = kv_fourier(0).real
    return float(np.prod(1.0 + 2.0 * w * g0 + w**2))


def square_wave(x) -> float:
    """SQUARE_WAVE_PATTERN on the cell [k/16, (k+1)/16) containing x"""
    x = Fraction(x) if isinstance(x, Fraction) else float(x)
    if not 0 <= x < 1:
        raise ConfigError(f"x must lie in [0, 1), got {x}")
    return float(SQUARE_WAVE_PATTERN[int(x * 2**SQUARE_WAVE_DEPTH)])


def square_wave_values(points: PointSet) -> np.ndarray:
    cells = points.numerators * 2**SQUARE_WAVE_DEPTH // points.denominator
    return np.prod(np.array(SQUARE_WAVE_PATTERN, dtype=np.float64)[cells], axis=1)


@lru_cache(maxsize=1)
def _square_wave_univariate() -> np.ndarray:
    """c_h = 2^{-4} sum_k pattern_k wal_h(k / 16) for h < 16"""
    cells = 2**SQUARE_WAVE_DEPTH
    grid = PointSet(numerators=np.arange(cells), denominator=cells)
    wal = unit_roots(2)[walsh_exponents(grid, np.arange(cells).reshape(-1, 1), 2)].real
    return np.array(SQUARE_WAVE_PATTERN, dtype=np.float64) @ wal / cells


def square_wave_coefficients(I: IndexSet) -> np.ndarray:
    """Exact Walsh coefficients (b = 2); zero for every h_j >= 16"""
    if I.basis_kind != "walsh":
        raise ConfigError("the square wave has Walsh coefficients")
    univariate = _square_wave_univariate()
    cells = univariate.size
    inside = I.members < cells
    factors = np.where(inside, univariate[np.where(inside, I.members, 0)], 0.0)
    return np.prod(factors, axis=1).astype(np.complex128)


def export_coefficients(path: Path | None = None, H: int = 64) -> Path:
    """Write kv coefficients for |h| <= H to the coefficient cache file"""
    path = Path(path or settings.cache.coefficient_path)
    CoefficientFile(path, tol=QUAD_EPSREL).write(
        "kv", {h: kv_fourier(h) for h in range(-H, H + 1)}
    )
    logger.info(f"kv coefficients |h| <= {H} exported to {path}")
    return path


def import_coefficients(path: Path | None = None) -> int:
    """Seed the memo from a coefficient cache file; returns the number of kv entries"""
    path = Path(path or settings.cache.coefficient_path)
    cache = get_cache()
    count = 0
    for (name, h), value in CoefficientFile(path).load().items():
        if name == "kv" and h >= 0:
            cache.set(f"kv_fourier:{h}", value)
            count += 1
    _kv_fourier_nonnegative.cache_clear()
    return count


function_registry: dict[str, TestFunction] = {}


def register_function(fn: TestFunction) -> TestFunction:
    """Register a test function under its name"""
    function_registry[fn.name] = fn
    return fn


def get_function(name: str) -> TestFunction:
    """Get a test function from the registry"""
    try:
        return function_registry[name]
    except KeyError as e:
        known = ", ".join(sorted(function_registry))
        raise ConfigError(f"unknown test function {name!r} (known: {known})") from e


def list_functions() -> list[str]:
    return sorted(function_registry)


register_function(
    TestFunction(
        name="kv",
        basis_kind="trig",
        description="Product of the normalised piecewise-analytic factor g",
        evaluator=kv_values,
        coefficient_oracle=kv_coefficients,
        norm_squared=lambda d: 1.0,
    )
)
register_function(
    TestFunction(
        name="kv-weighted",
        basis_kind="trig",
        description="prod_j (1 + j^-8 g(x_j))",
        evaluator=f_weighted_values,
        coefficient_oracle=f_weighted_coefficients,
        norm_squared=f_weighted_norm_sq,
    )
)
register_function(
    TestFunction(
        name="square-wave",
        basis_kind="walsh",
        description="+-1 pattern on the depth-4 dyadic cells",
        evaluator=square_wave_values,
        coefficient_oracle=square_wave_coefficients,
        norm_squared=lambda d: 1.0,
    )
)
