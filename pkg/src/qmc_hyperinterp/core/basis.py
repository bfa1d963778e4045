"""Evaluation of trigonometric and Walsh basis functions on exact point sets."""

import numpy as np

from qmc_hyperinterp.exceptions import ConfigError
from qmc_hyperinterp.types import BasisKind, PointSet


def digit_precision(denominator: int, b: int) -> int:
    """m with b^m == denominator"""
    m, n = 0, 1
    while n < denominator:
        n *= b
        m += 1
    if n != denominator:
        raise ConfigError(f"walsh evaluation needs a power-of-{b} denominator, got {denominator}")
    return m


def point_digits(numerators: np.ndarray, m: int, b: int) -> np.ndarray:
    """Digits x_1..x_m of k / b^m, shape (..., m)"""
    powers = b ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return (numerators[..., None] // powers) % b


def frequency_digits(h: np.ndarray, m: int, b: int) -> np.ndarray:
    """Digits h_0..h_{m-1} of h, shape (..., m); higher digits never meet a nonzero x digit"""
    powers = b ** np.arange(m, dtype=np.int64)
    return (h[..., None] // powers) % b


def walsh_exponents(points: PointSet, members: np.ndarray, b: int) -> np.ndarray:
    """Integer exponents e with wal_h(x_n) = exp(2 pi i e / b), shape (N, |I|)"""
    m = digit_precision(points.denominator, b)
    members = np.asarray(members, dtype=np.int64)
    if members.size and members.min() < 0:
        raise ConfigError("walsh frequencies must be non-negative")
    xd = point_digits(points.numerators, m, b)
    hd = frequency_digits(members, m, b)
    exps = np.zeros((points.size, members.shape[0]), dtype=np.int64)
    for j in range(points.dim):
        exps += xd[:, j, :] @ hd[:, j, :].T
    return exps % b


def trig_phases(points: PointSet, members: np.ndarray) -> np.ndarray:
    """Residues r with exp(2 pi i h.x_n) = exp(2 pi i r / denominator)"""
    den = points.denominator
    members = np.asarray(members, dtype=np.int64) % den
    return (points.numerators @ members.T) % den


def unit_roots(n: int) -> np.ndarray:
    """exp(2 pi i k / n) for k = 0..n-1, with the real axis and quarter turns exact"""
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    k = np.arange(n)
    roots[k * 2 == n] = -1.0
    roots[k * 4 == n] = 1j
    roots[k * 4 == 3 * n] = -1j
    roots[0] = 1.0
    idx = np.arange(1, (n + 1) // 2)
    roots[n - idx] = np.conj(roots[idx])
    return roots


_TABLE_LIMIT = 1 << 22


def basis_matrix(
    points: PointSet, members: np.ndarray, basis_kind: BasisKind = "trig", b: int = 2
) -> np.ndarray:
    """B[n, k] = q_{h_k}(x_n)"""
    members = np.atleast_2d(np.asarray(members, dtype=np.int64))
    if members.shape[1] != points.dim:
        raise ConfigError(
            f"dimension mismatch: points d={points.dim}, frequencies d={members.shape[1]}"
        )
    if basis_kind == "walsh":
        return unit_roots(b)[walsh_exponents(points, members, b)]
    phases = trig_phases(points, members)
    if points.denominator <= _TABLE_LIMIT:
        return unit_roots(points.denominator)[phases]
    return np.exp(2j * np.pi * phases / points.denominator)
