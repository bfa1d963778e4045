"""
Quality criteria R and S for rank-1 lattices.

Both use the Korobov kernel
    K(x) = sum_{h != 0} exp(2 pi i h x) / |h|^{2 alpha}
         = (-1)^{alpha+1} (2 pi)^{2 alpha} / (2 alpha)! * B_{2 alpha}(x),
which is exact for integer alpha. The dual-lattice oracles below accept any
alpha > 1/2 and are meant for cross-checks.
"""

import math
from fractions import Fraction

import numpy as np

from qmc_hyperinterp.core.numerics import clamped_sqrt, excess_product, neumaier_sum
from qmc_hyperinterp.weights_index import ProductWeights, zeta

from .schemas import CriterionValue, Rank1Lattice

# monomial coefficients, lowest degree first
BERNOULLI = {
    2: (Fraction(1, 6), Fraction(-1), Fraction(1)),
    4: (Fraction(-1, 30), Fraction(0), Fraction(1), Fraction(-2), Fraction(1)),
    6: (
        Fraction(1, 42),
        Fraction(0),
        Fraction(-1, 2),
        Fraction(0),
        Fraction(5, 2),
        Fraction(-3),
        Fraction(1),
    ),
    8: (
        Fraction(-1, 30),
        Fraction(0),
        Fraction(2, 3),
        Fraction(0),
        Fraction(-7, 3),
        Fraction(0),
        Fraction(14, 3),
        Fraction(-4),
        Fraction(1),
    ),
}


def bernoulli_poly(degree: int, x: np.ndarray | float) -> np.ndarray | float:
    coeffs = BERNOULLI[degree]
    result = np.zeros_like(np.asarray(x, dtype=np.float64))
    for c in reversed(coeffs):
        result = result * x + float(c)
    return result


def kernel_scale(alpha: int) -> float:
    return (-1) ** (alpha + 1) * (2 * math.pi) ** (2 * alpha) / math.factorial(2 * alpha)


def korobov_kernel(x: np.ndarray | float, alpha: int) -> np.ndarray | float:
    return kernel_scale(alpha) * bernoulli_poly(2 * alpha, x)


def _bernoulli_exact(degree: int, x: Fraction) -> Fraction:
    result = Fraction(0)
    for c in reversed(BERNOULLI[degree]):
        result = result * x + c
    return result


def kernel_table(N: int, alpha: int) -> np.ndarray:
    """
    K(k/N) for k = 0..N-1, mirrored so K((N-k)/N) == K(k/N) bit for bit.

    The Bernoulli polynomial is evaluated in rationals and rounded once.
    """
    half = N // 2
    scale = kernel_scale(alpha)
    table = np.empty(N)
    table[: half + 1] = [
        scale * float(_bernoulli_exact(2 * alpha, Fraction(k, N))) for k in range(half + 1)
    ]
    table[half + 1 :] = table[1 : N - half][::-1]
    return table


def kernel_increments(table: np.ndarray, gamma2: float | np.ndarray, power: int) -> np.ndarray:
    """(1 + gamma^2 K)^power - 1 for power 1 or 2"""
    a = gamma2 * table
    return a if power == 1 else a * (2.0 + a)


def _coordinate_increments(L: Rank1Lattice, w: ProductWeights, power: int) -> np.ndarray:
    """(1 + gamma_j^2 K({n z_j / N}))^power - 1 for every point n and coordinate j"""
    table = kernel_table(L.N, w.integer_alpha)
    gam2 = w.gammas(L.d) ** 2
    n = np.arange(L.N, dtype=np.int64)
    idx = np.outer(n, np.array(L.z, dtype=np.int64)) % L.N
    return kernel_increments(table[idx], gam2, power)


def r_squared(L: Rank1Lattice, w: ProductWeights) -> float:
    return float(neumaier_sum(excess_product(_coordinate_increments(L, w, 1)))) / L.N


def r_criterion(L: Rank1Lattice, w: ProductWeights) -> CriterionValue:
    """R = sqrt(sum over nonzero dual vectors of 1 / r^2)"""
    return CriterionValue(
        kind="R",
        value=clamped_sqrt(r_squared(L, w)),
        n_points=L.N,
        d=L.d,
        alpha=w.alpha,
        gamma_spec=w.gamma_spec,
    )


def s_offset_excess(w: ProductWeights, d: int) -> float:
    """The h* = 0 term of S^2 minus one: prod_j (1 + 2 zeta(4 alpha) gamma_j^4) - 1"""
    return float(excess_product(2.0 * zeta(4 * w.alpha) * w.gammas(d) ** 4))


def s_squared(L: Rank1Lattice, w: ProductWeights) -> float:
    mean_excess = float(neumaier_sum(excess_product(_coordinate_increments(L, w, 2)))) / L.N
    return mean_excess - s_offset_excess(w, L.d)


def s_criterion(L: Rank1Lattice, w: ProductWeights) -> CriterionValue:
    return CriterionValue(
        kind="S",
        value=clamped_sqrt(s_squared(L, w)),
        n_points=L.N,
        d=L.d,
        alpha=w.alpha,
        gamma_spec=w.gamma_spec,
    )


def r_cbc_bound(N: int, d: int, w: ProductWeights, tau: float = 0.5) -> float:
    """Upper bound on R for a CBC vector, tau in [1/2, alpha)"""
    if not 0.5 <= tau < w.alpha:
        raise ValueError("tau must lie in [1/2, alpha)")
    gam = w.gammas(d)
    product = np.prod(1.0 + 2.0 * gam ** (1 / (2 * tau)) * zeta(w.alpha / tau))
    return float((2.0 / N) ** tau * product**tau)


def s_cbc_bound(N: int, d: int, w: ProductWeights, tau: float = 0.5) -> float:
    if not 0.5 <= tau < w.alpha:
        raise ValueError("tau must lie in [1/2, alpha)")
    gam = w.gammas(d)
    product = np.prod(
        1.0 + 2.0 ** (4 * w.alpha + 1) * zeta(w.alpha / tau) * gam ** (1 / (2 * tau))
    )
    return float(N ** (-tau) * product ** (2 * tau))


def _box(d: int, H: int) -> np.ndarray:
    side = np.arange(-H, H + 1, dtype=np.int64)
    return np.stack(np.meshgrid(*([side] * d), indexing="ij"), axis=-1).reshape(-1, d)


def inverse_r2(members: np.ndarray, w: ProductWeights) -> np.ndarray:
    """1 / r(h)^2 for Korobov decay, any alpha > 1/2"""
    gam2 = w.gammas(members.shape[1]) ** 2
    with np.errstate(divide="ignore"):
        terms = np.where(
            members != 0, gam2 / np.abs(members).astype(np.float64) ** (2 * w.alpha), 1.0
        )
    return np.prod(terms, axis=1)


def r2_dual_oracle(L: Rank1Lattice, w: ProductWeights, H: int) -> float:
    """sum of 1/r^2 over nonzero dual vectors in the box |h_j| <= H"""
    box = _box(L.d, H)
    dual = (box @ np.array(L.z, dtype=np.int64)) % L.N == 0
    dual &= np.any(box != 0, axis=1)
    return float(np.sum(inverse_r2(box[dual], w)))


def dual_tail_bound(d: int, w: ProductWeights, H: int) -> float:
    """Mass of sum 1/r^2 over all h with some |h_j| > H"""
    gam2 = w.gammas(d) ** 2
    tail = H ** (1 - 2 * w.alpha) / (2 * w.alpha - 1)
    full = 1.0 + 2.0 * gam2 * zeta(2 * w.alpha)
    total = 0.0
    for j in range(d):
        total += 2.0 * gam2[j] * tail * float(np.prod(np.delete(full, j)))
    return total


def s2_dual_oracle(L: Rank1Lattice, w: ProductWeights, H: int) -> float:
    """Truncated double sum over h* in the dual (nonzero) and h' in the box"""
    box = _box(L.d, H)
    z = np.array(L.z, dtype=np.int64)
    dual = box[((box @ z) % L.N == 0) & np.any(box != 0, axis=1)]
    weights = inverse_r2(box, w)
    total = 0.0
    for hstar in dual:
        total += float(np.sum(weights * inverse_r2(box + hstar, w)))
    return total
