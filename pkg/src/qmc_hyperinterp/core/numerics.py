import math

import numpy as np
from loguru import logger


def neumaier_sum(values: np.ndarray, axis: int = 0) -> np.ndarray | float | complex:
    """Compensated (Kahan-Babuska-Neumaier) sum along one axis, vectorised over the rest"""
    arr = np.moveaxis(np.asarray(values), axis, 0)
    if np.iscomplexobj(arr):
        return neumaier_sum(arr.real) + 1j * neumaier_sum(arr.imag)
    arr = arr.astype(np.float64, copy=False)
    total = np.zeros(arr.shape[1:])
    comp = np.zeros(arr.shape[1:])
    for row in arr:
        t = total + row
        comp += np.where(np.abs(total) >= np.abs(row), (total - t) + row, (row - t) + total)
        total = t
    result = total + comp
    return result if result.ndim else float(result)


def extend_excess(excess: np.ndarray, increment: np.ndarray) -> np.ndarray:
    """(1 + excess) * (1 + increment) - 1 without forming the product"""
    return excess + increment + excess * increment


def excess_product(increments: np.ndarray, axis: int = -1) -> np.ndarray:
    """prod(1 + a) - 1 along one axis; stays accurate when the result is tiny"""
    arr = np.moveaxis(np.asarray(increments, dtype=np.float64), axis, 0)
    excess = np.zeros(arr.shape[1:])
    for increment in arr:
        excess = extend_excess(excess, increment)
    return excess


def argmin_smallest(values: np.ndarray, rtol: float) -> int:
    """
    Index of the first value within rtol (relative) of the minimum.

    The tolerance scales with the minimum itself, so callers pass the
    criterion and not 1 + criterion.
    """
    values = np.asarray(values, dtype=np.float64)
    best = values.min()
    return int(np.flatnonzero(values <= best + rtol * abs(best))[0])


def spectral_norm_hermitian(
    matrix: np.ndarray,
    tol: float,
    max_iter: int,
    fallback_dim: int,
) -> tuple[float, bool, str]:
    """
    Largest absolute eigenvalue of a Hermitian matrix.

    Power iteration on ||A v||, which converges for +-lambda pairs as well.
    Returns (value, converged, method).
    """
    n = matrix.shape[0]
    if n == 0:
        return 0.0, True, "power"
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    previous = -1.0
    estimate = 0.0
    for _ in range(max_iter):
        w = matrix @ v
        estimate = float(np.linalg.norm(w))
        if estimate == 0.0:
            return 0.0, True, "power"
        v = w / estimate
        if abs(estimate - previous) <= tol * max(1.0, estimate):
            return estimate, True, "power"
        previous = estimate
    if n <= fallback_dim:
        eigenvalues = np.linalg.eigvalsh(matrix)
        return float(np.max(np.abs(eigenvalues))), True, "eigh"
    logger.warning(f"power iteration did not converge at dimension {n}")
    return estimate, False, "power"


NEGATIVE_CLAMP = 1e-9


def clamped_sqrt(value: float, clamp: float = NEGATIVE_CLAMP) -> float:
    """sqrt of a squared criterion; rounding negatives down to -clamp read as 0"""
    if value < 0:
        if value < -clamp:
            raise ArithmeticError(f"criterion squared is negative: {value}")
        return 0.0
    return math.sqrt(value)
