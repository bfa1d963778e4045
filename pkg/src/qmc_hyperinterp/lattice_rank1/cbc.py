import numpy as np
from loguru import logger
from sympy import isprime

from qmc_hyperinterp.core.numerics import argmin_smallest, extend_excess, neumaier_sum
from qmc_hyperinterp.core.records import VectorRecordStore
from qmc_hyperinterp.exceptions import ConfigError
from qmc_hyperinterp.settings import settings
from qmc_hyperinterp.weights_index import ProductWeights

from .criteria import kernel_increments, kernel_table, s_offset_excess
from .exact import exact_stage_scores
from .schemas import Rank1Lattice

NOISE_ULPS = 64


def stage_scores(
    N: int,
    excess: np.ndarray,
    table: np.ndarray,
    gamma2: float,
    candidates: np.ndarray,
    power: int,
) -> np.ndarray:
    """
    mean_n [(1 + excess[n]) (1 + gamma2 K({n c / N}))^power - 1] for every candidate c.

    excess holds prod over the already fixed coordinates of (1 + gamma^2 K)^power,
    minus one. The leading 1 never enters a sum, so a score is accurate to the
    rounding of its summed terms and not to the rounding unit of 1.
    """
    n = np.arange(N, dtype=np.int64)
    scores = np.empty(candidates.size)
    block = settings.compute.candidate_block
    for start in range(0, candidates.size, block):
        cblock = candidates[start : start + block]
        increments = kernel_increments(table[np.outer(n, cblock) % N], gamma2, power)
        scores[start : start + cblock.size] = (
            neumaier_sum(extend_excess(excess[:, None], increments)) / N
        )
    return scores


def _choose(
    N: int,
    z: list[int],
    w: ProductWeights,
    candidates: np.ndarray,
    scores: np.ndarray,
    power: int,
    magnitude: float,
) -> int:
    """
    Smallest candidate within tie_rtol of the minimum.

    Candidates closer to the float minimum than the rounding floor of the
    summed terms are re-scored exactly before the tie rule applies.
    """
    rtol = settings.compute.tie_rtol
    best = scores.min()
    floor = NOISE_ULPS * np.finfo(np.float64).eps * magnitude
    close = np.flatnonzero(scores <= best + max(rtol * abs(best), floor))
    if close.size == 1:
        return int(candidates[close[0]])
    exact = exact_stage_scores(N, tuple(z), w, candidates[close], power)
    logger.debug(f"re-scored {close.size} candidates within {floor:.1e} of the minimum")
    return int(candidates[close[argmin_smallest(exact, rtol)]])


def _cbc_search(N: int, d: int, w: ProductWeights, power: int) -> tuple[int, ...]:
    table = kernel_table(N, w.integer_alpha)
    gam2 = w.gammas(d) ** 2
    n = np.arange(N, dtype=np.int64)
    excess = kernel_increments(table, gam2[0], power)
    candidates = np.arange(1, N, dtype=np.int64)
    z = [1]
    for s in range(1, d):
        scores = stage_scores(N, excess, table, gam2[s], candidates, power)
        if power == 2:
            scores -= s_offset_excess(w, s + 1)
        magnitude = (1.0 + np.abs(excess).max()) * (
            1.0 + np.abs(kernel_increments(table, gam2[s], power)).max()
        )
        chosen = _choose(N, z, w, candidates, scores, power, magnitude)
        z.append(chosen)
        excess = extend_excess(excess, kernel_increments(table[(n * chosen) % N], gam2[s], power))
        logger.debug(f"CBC stage {s + 1}/{d}: z={chosen} score={scores.min():.6e}")
    return tuple(z)


def _cbc(
    kind: str, N: int, d: int, w: ProductWeights, use_cache: bool | None
) -> Rank1Lattice:
    if not isprime(N):
        raise ConfigError(f"CBC construction needs a prime N, got {N}")
    if d < 1:
        raise ConfigError("dimension must be positive")
    use_cache = settings.cache.use_vector_cache if use_cache is None else use_cache
    store = VectorRecordStore(settings.cache.vector_path) if use_cache else None
    if store is not None:
        cached = store.lookup_rank1(kind, N, d, w.alpha, w.gamma_spec)
        if cached is not None:
            logger.info(f"CBC-{kind} N={N} d={d}: cached")
            return Rank1Lattice(N=N, z=cached)
    z = _cbc_search(N, d, w, power=1 if kind == "R" else 2)
    if store is not None:
        store.store_rank1(kind, N, w.alpha, w.gamma_spec, z)
    return Rank1Lattice(N=N, z=z)


def cbc_r(N: int, d: int, w: ProductWeights, use_cache: bool | None = None) -> Rank1Lattice:
    """Component-by-component minimisation of R"""
    return _cbc("R", N, d, w, use_cache)


def cbc_s(N: int, d: int, w: ProductWeights, use_cache: bool | None = None) -> Rank1Lattice:
    """Component-by-component minimisation of S"""
    return _cbc("S", N, d, w, use_cache)


def was_cached(kind: str, N: int, d: int, w: ProductWeights) -> bool:
    store = VectorRecordStore(settings.cache.vector_path)
    return store.lookup_rank1(kind, N, d, w.alpha, w.gamma_spec) is not None
