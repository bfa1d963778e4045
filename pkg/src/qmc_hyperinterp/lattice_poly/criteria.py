"""
The Walsh quality criterion R-breve for polynomial lattices.

Summing the Walsh series sum_{h >= 1} wal_h(x) / b^{2 alpha mu1(h)} level by
level gives a closed form depending only on the position c0 of the first
nonzero base-b digit of x:

    phi(0) = (b - 1) / (b^{2 alpha} - b)
    phi(x) = phi(0) - b^{(1 - 2 alpha) c0} (b^{2 alpha} - 1) / (b^{2 alpha} - b)

`phi_alpha_printed` keeps the variant with b^{-2 alpha c0}; it disagrees with
the series and is only used to show that.
"""

from fractions import Fraction

import numpy as np

from qmc_hyperinterp.core.basis import frequency_digits, point_digits, unit_roots
from qmc_hyperinterp.core.numerics import clamped_sqrt, excess_product, neumaier_sum
from qmc_hyperinterp.exceptions import ConfigError
from qmc_hyperinterp.lattice_rank1 import CriterionValue
from qmc_hyperinterp.weights_index import ProductWeights, digit_add
from qmc_hyperinterp.weights_index.base import mu1_array

from .base import generate_poly_points, poly_residues
from .schemas import PolyLattice


def _check_alpha(alpha: float) -> None:
    if alpha <= 0.5:
        raise ConfigError(f"alpha must exceed 1/2, got {alpha}")


def first_digit_position(x: Fraction, b: int) -> int:
    """c0 with b^{-c0} <= x < b^{1-c0}; 0 for x = 0"""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ConfigError(f"x must lie in [0, 1), got {x}")
    if x == 0:
        return 0
    c = 1
    while x * b**c < 1:
        c += 1
    return c


def _phi_from_position(c0: np.ndarray | int, alpha: float, b: int, exponent_scale: float):
    base = (b - 1) / (float(b) ** (2 * alpha) - b)
    drop = (float(b) ** (2 * alpha) - 1) / (float(b) ** (2 * alpha) - b)
    c0 = np.asarray(c0, dtype=np.float64)
    values = np.where(c0 > 0, base - float(b) ** (exponent_scale * c0) * drop, base)
    return values if values.ndim else float(values)


def phi_alpha(x: Fraction, alpha: float, b: int = 2) -> float:
    _check_alpha(alpha)
    return _phi_from_position(first_digit_position(x, b), alpha, b, 1 - 2 * alpha)


def phi_alpha_printed(x: Fraction, alpha: float, b: int = 2) -> float:
    _check_alpha(alpha)
    return _phi_from_position(first_digit_position(x, b), alpha, b, -2 * alpha)


def phi_table(m: int, alpha: float, b: int = 2) -> np.ndarray:
    """phi(k / b^m) for k = 0..b^m-1"""
    _check_alpha(alpha)
    k = np.arange(b**m, dtype=np.int64)
    c0 = np.where(k > 0, m + 1 - mu1_array(k, b), 0)
    return _phi_from_position(c0, alpha, b, 1 - 2 * alpha)


def phi_series_oracle(x: Fraction, alpha: float, b: int = 2, levels: int = 16) -> float:
    """sum_{h=1}^{b^levels - 1} wal_h(x) b^{-2 alpha mu1(h)}, literally"""
    x = Fraction(x)
    m = 0
    while (x * b**m).denominator != 1:
        m += 1
        if m > 64:
            raise ConfigError(f"{x} has no finite base-{b} expansion")
    m = max(m, 1)
    numerator = np.array([int(x * b**m)], dtype=np.int64)
    xd = point_digits(numerator, m, b)[0]
    h = np.arange(1, b**levels, dtype=np.int64)
    exps = (frequency_digits(h, m, b) @ xd) % b
    values = unit_roots(b)[exps].real
    decay = float(b) ** (-2 * alpha * mu1_array(h, b).astype(np.float64))
    return float(np.sum(values * decay))


def rbreve_squared(PL: PolyLattice, w: ProductWeights) -> float:
    table = phi_table(PL.m, w.alpha, PL.b)
    gam2 = w.gammas(PL.d) ** 2
    points = generate_poly_points(PL)
    increments = gam2 * table[points.numerators]
    return float(neumaier_sum(excess_product(increments))) / PL.n_points


def rbreve_criterion(PL: PolyLattice, w: ProductWeights) -> CriterionValue:
    """R-breve^2 = -1 + (1/b^m) sum_x prod_j (1 + gamma_j^2 phi(x_j))"""
    return CriterionValue(
        kind="Rbreve",
        value=clamped_sqrt(rbreve_squared(PL, w)),
        n_points=PL.n_points,
        d=PL.d,
        alpha=w.alpha,
        gamma_spec=w.gamma_spec,
    )


def rbreve_cbc_bound(m: int, d: int, w: ProductWeights, lam: float = 1.0, b: int = 2) -> float:
    """Upper bound on R-breve for a CBC polynomial lattice, 1/(2 alpha) < lam <= 1"""
    if not 1.0 / (2.0 * w.alpha) < lam <= 1.0:
        raise ConfigError("lambda must lie in (1/(2 alpha), 1]")
    gam2 = w.gammas(d) ** 2
    product = np.prod(1.0 + gam2 * (b - 1) / (float(b) ** (2 * w.alpha * lam) - b))
    return float((2.0 / (b**m - 1) * (product - 1.0)) ** (1.0 / (2.0 * lam)))


def rbreve2_dual_oracle(PL: PolyLattice, w: ProductWeights, levels: int = 12) -> float:
    """
    sum of 1/r-breve^2 over nonzero dual vectors with every h_j < b^levels.

    Frequencies are grouped by their residue tr_m(h_j) q_j mod p; the dual
    condition is then a convolution over the residue group.
    """
    b, n = PL.b, PL.n_points
    h = np.arange(b**levels, dtype=np.int64)
    gam2 = w.gammas(PL.d) ** 2
    level_decay = float(b) ** (-2 * w.alpha * mu1_array(h, b).astype(np.float64))
    residue_index = np.arange(n, dtype=np.int64)
    total = np.zeros(n)
    total[0] = 1.0
    for j in range(PL.d):
        members = np.zeros((h.size, PL.d), dtype=np.int64)
        members[:, j] = h
        residues = poly_residues(PL, members)
        weights = np.where(h > 0, gam2[j] * level_decay, 1.0)
        mass = np.bincount(residues, weights=weights, minlength=n)
        # digit-wise group addition on residue encodings
        combined = np.zeros(n)
        for r in range(n):
            if total[r]:
                combined[digit_add(r, residue_index, b)] += total[r] * mass
        total = combined
    return float(total[0] - 1.0)


def rbreve2_tail_bound(d: int, w: ProductWeights, levels: int, b: int = 2) -> float:
    """Mass of sum 1/r-breve^2 over all h with some h_j >= b^levels"""
    gam2 = w.gammas(d) ** 2
    ratio = float(b) ** (1 - 2 * w.alpha)
    tail = gam2 * (b - 1) / b * ratio ** (levels + 1) / (1 - ratio)
    full = 1.0 + gam2 * (b - 1) / (float(b) ** (2 * w.alpha) - b)
    return float(sum(tail[j] * np.prod(np.delete(full, j)) for j in range(d)))
