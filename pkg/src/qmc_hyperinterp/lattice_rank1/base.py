import math
from collections.abc import Sequence

import numpy as np
from loguru import logger

from qmc_hyperinterp.core.basis import basis_matrix, unit_roots
from qmc_hyperinterp.core.numerics import neumaier_sum, spectral_norm_hermitian
from qmc_hyperinterp.exceptions import ConfigError, ImpossibilityError, ResourceCapError
from qmc_hyperinterp.settings import settings
from qmc_hyperinterp.types import BasisKind, PointSet
from qmc_hyperinterp.weights_index import IndexSet

from .schemas import EtaEstimate, Rank1Lattice

_GRAM_ROW_CHUNK = 4096


def generate_points(L: Rank1Lattice) -> PointSet:
    """Point n is (n z mod N) / N, kept as exact numerators over N"""
    n = np.arange(L.N, dtype=np.int64)
    return PointSet(
        numerators=np.outer(n, np.array(L.z, dtype=np.int64)) % L.N, denominator=L.N
    )


def fibonacci_lattice(n: int) -> Rank1Lattice:
    """N = F_n, z = (1, F_{n-1}) with F_1 = F_2 = 1"""
    if n < 4:
        raise ConfigError("Fibonacci lattices need n >= 4")
    a, b = 1, 1
    for _ in range(n - 2):
        a, b = b, a + b
    return Rank1Lattice(N=b, z=(1, a))


def _check_dim(h: Sequence[int], L: Rank1Lattice) -> None:
    if len(h) != L.d:
        raise ConfigError(f"frequency has d={len(h)}, lattice has d={L.d}")


def is_dual(h: Sequence[int], L: Rank1Lattice) -> bool:
    """h . z == 0 (mod N)"""
    _check_dim(h, L)
    total = 0
    for hj, zj in zip(h, L.z):
        total = (total + (hj % L.N) * zj) % L.N
    return total == 0


def char_sum(h: Sequence[int], L: Rank1Lattice) -> complex:
    """Lattice average of exp(2 pi i h.x): 1 on the dual lattice, 0 elsewhere"""
    return 1.0 + 0j if is_dual(h, L) else 0j


def char_sum_literal(h: Sequence[int], L: Rank1Lattice) -> complex:
    """The same average, summed point by point"""
    _check_dim(h, L)
    points = generate_points(L)
    residues = (points.numerators @ (np.array(h, dtype=np.int64) % L.N)) % L.N
    return complex(neumaier_sum(unit_roots(L.N)[residues])) / L.N


def verify_reconstruction(L: Rank1Lattice, I: IndexSet) -> bool:
    """h . z mod N pairwise distinct over I"""
    if I.basis_kind != "trig":
        raise ConfigError("the reconstruction property is defined for trig index sets")
    if I.dim != L.d:
        raise ConfigError(f"index set has d={I.dim}, lattice has d={L.d}")
    if I.size > L.N:
        raise ImpossibilityError(f"|I| = {I.size} exceeds N = {L.N}")
    residues = (I.members % L.N) @ np.array(L.z, dtype=np.int64) % L.N
    return np.unique(residues).size == I.size


def unit_candidates(N: int) -> np.ndarray:
    """{z in 1..N-1 : gcd(z, N) = 1}"""
    c = np.arange(1, N, dtype=np.int64)
    return c[np.gcd(c, N) == 1]


def cbc_reconstruction(N: int, d: int, I: IndexSet) -> Rank1Lattice | None:
    """
    Search for a generating vector with the reconstruction property.

    z_1 = 1; stage l takes the first unit candidate that keeps the residues of
    the projection of I onto the first l+1 coordinates pairwise distinct.
    """
    if I.basis_kind != "trig" or I.dim != d:
        raise ConfigError("reconstruction search needs a trig index set of matching d")
    if I.size > N:
        raise ImpossibilityError(f"|I| = {I.size} exceeds N = {N}")
    members = I.members
    z = [1]
    if d == 1 or I.size <= 1:
        z = [1] * d
        lattice = Rank1Lattice(N=N, z=tuple(z))
        return lattice if verify_reconstruction(lattice, I) else None

    candidates = unit_candidates(N)
    block = settings.compute.candidate_block
    for j in range(1, d):
        projection = np.unique(members[:, : j + 1], axis=0)
        base = ((projection[:, :j] % N) @ np.array(z, dtype=np.int64)) % N
        column = projection[:, j] % N
        chosen = None
        for start in range(0, candidates.size, block):
            cblock = candidates[start : start + block]
            residues = np.sort((base[:, None] + np.outer(column, cblock)) % N, axis=0)
            distinct = np.all(np.diff(residues, axis=0) != 0, axis=0)
            if distinct.any():
                chosen = int(cblock[np.argmax(distinct)])
                break
        if chosen is None:
            logger.debug(f"reconstruction search failed at stage {j + 1} for N={N}")
            return None
        z.append(chosen)
    return Rank1Lattice(N=N, z=tuple(z))


def smallest_reconstructing_lattice(
    I: IndexSet, start: int | None = None, growth: float = 1 / 32
) -> Rank1Lattice:
    """Run the reconstruction search for N = |I|, then on a geometric ladder upwards"""
    N = max(I.size, 2, start or 0)
    spans = np.ptp(I.members, axis=0) + 1 if I.size else np.ones(I.dim, dtype=np.int64)
    limit = 4 * int(np.prod(spans)) + 2 * N
    while N <= limit:
        lattice = cbc_reconstruction(N, I.dim, I)
        if lattice is not None:
            return lattice
        N += max(1, math.ceil(N * growth))
    raise ImpossibilityError(f"no reconstructing lattice found up to N = {limit}")


def lattice_eta(L: Rank1Lattice, I: IndexSet) -> EtaEstimate:
    """
    Exact eta for rank-1 lattices. G[h, h'] = [h.z == h'.z mod N], so G is a
    direct sum of all-ones blocks and ||G - Id|| = (largest block) - 1.
    """
    residues = (I.members % L.N) @ np.array(L.z, dtype=np.int64) % L.N
    _, counts = np.unique(residues, return_counts=True)
    largest = int(counts.max()) if counts.size else 1
    return EtaEstimate(eta=float(largest - 1), gram_dim=I.size, method="exact")


def gram_matrix(
    points: PointSet, I: IndexSet, basis_kind: BasisKind | None = None, b: int = 2
) -> np.ndarray:
    """G[h, h'] = (1/N) sum_n q_{h'}(x_n) conj(q_h(x_n))"""
    basis_kind = basis_kind or I.basis_kind
    gram = np.zeros((I.size, I.size), dtype=np.complex128)
    for start in range(0, points.size, _GRAM_ROW_CHUNK):
        chunk = PointSet(
            numerators=points.numerators[start : start + _GRAM_ROW_CHUNK],
            denominator=points.denominator,
        )
        B = basis_matrix(chunk, I.members, basis_kind, b)
        gram += B.conj().T @ B
    return gram / points.size


def estimate_eta(
    points: PointSet, I: IndexSet, basis_kind: BasisKind | None = None, b: int = 2
) -> EtaEstimate:
    """Largest absolute eigenvalue of G - Id for the basis functions of I on the points"""
    if I.size > settings.compute.max_gram_dim:
        raise ResourceCapError(
            f"|I| = {I.size} exceeds the dense Gram limit {settings.compute.max_gram_dim}"
        )
    deviation = gram_matrix(points, I, basis_kind, b) - np.eye(I.size)
    eta, converged, method = spectral_norm_hermitian(
        deviation,
        tol=settings.compute.power_tol,
        max_iter=settings.compute.power_max_iter,
        fallback_dim=settings.compute.eigh_fallback_dim,
    )
    logger.debug(f"eta={eta:.3e} on |I|={I.size} via {method}")
    return EtaEstimate(eta=eta, gram_dim=I.size, converged=converged, method=method)
