import numpy as np
from loguru import logger

from qmc_hyperinterp.core.basis import frequency_digits
from qmc_hyperinterp.core.numerics import argmin_smallest, extend_excess, neumaier_sum
from qmc_hyperinterp.core.records import VectorRecordStore
from qmc_hyperinterp.exceptions import ConfigError
from qmc_hyperinterp.field_poly import FieldPoly, is_irreducible, smallest_irreducible
from qmc_hyperinterp.settings import settings
from qmc_hyperinterp.weights_index import ProductWeights

from .base import coordinate_numerators, expansion_digits
from .criteria import phi_table
from .schemas import PolyLattice


def candidate_digit_rows(p: FieldPoly) -> np.ndarray:
    """
    Laurent digit rows of q/p for every q of degree < m, in integer-encoding order.

    The expansion is linear in q, so the rows are combinations of the rows of
    x^k / p.
    """
    m, b = p.degree, p.b
    unit_rows = np.stack([expansion_digits(FieldPoly.monomial(k, b), p) for k in range(m)])
    qd = frequency_digits(np.arange(b**m, dtype=np.int64), m, b)
    return (qd @ unit_rows) % b


def _resolve_modulus(m: int, b: int, p: FieldPoly | None) -> FieldPoly:
    if p is None:
        return smallest_irreducible(m, b)
    if p.b != b or p.degree != m:
        raise ConfigError(f"modulus {p} is not a degree-{m} polynomial over F_{b}")
    if not is_irreducible(p):
        raise ConfigError(f"modulus {p} is reducible")
    return p


def _poly_search(m: int, d: int, w: ProductWeights, p: FieldPoly) -> tuple[int, ...]:
    """
    Encodings of q_1..q_d minimising R-breve stage by stage.

    Scores are R-breve^2 itself: the excess prod (1 + gamma^2 phi) - 1 is carried
    per point, so the tie tolerance is relative to the criterion.
    """
    b = p.b
    n = b**m
    table = phi_table(m, w.alpha, b)
    gam2 = w.gammas(d) ** 2
    rows = candidate_digit_rows(p)
    excess = gam2[0] * table[coordinate_numerators(rows[1], m, b)[0]]
    chosen = [1]
    block = settings.compute.candidate_block
    for s in range(1, d):
        scores = np.empty(n)
        for start in range(0, n, block):
            numerators = coordinate_numerators(rows[start : start + block], m, b)
            increments = gam2[s] * table[numerators]
            scores[start : start + numerators.shape[0]] = (
                neumaier_sum(extend_excess(excess[None, :], increments), axis=1) / n
            )
        best = argmin_smallest(scores, settings.compute.tie_rtol)
        chosen.append(best)
        excess = extend_excess(
            excess, gam2[s] * table[coordinate_numerators(rows[best], m, b)[0]]
        )
        logger.debug(f"poly CBC stage {s + 1}/{d}: q={best} score={scores[best]:.6e}")
    return tuple(chosen)


def cbc_poly(
    m: int,
    d: int,
    w: ProductWeights,
    b: int = 2,
    p: FieldPoly | None = None,
    use_cache: bool | None = None,
) -> PolyLattice:
    """
    Component-by-component minimisation of R-breve over polynomial lattices.

    q_1 = 1 and every later q_j ranges over all b^m polynomials of degree < m;
    near-ties go to the smallest integer encoding.
    """
    if d < 1:
        raise ConfigError("dimension must be positive")
    p = _resolve_modulus(m, b, p)
    use_cache = settings.cache.use_vector_cache if use_cache is None else use_cache
    store = VectorRecordStore(settings.cache.vector_path) if use_cache else None
    if store is not None:
        cached = store.lookup_poly(b, m, p.coeffs, d, w.alpha, w.gamma_spec)
        if cached is not None:
            logger.info(f"poly CBC b={b} m={m} d={d}: cached")
            return PolyLattice(
                b=b, m=m, p=p, q=tuple(FieldPoly(b=b, coeffs=c) for c in cached)
            )
    encodings = _poly_search(m, d, w, p)
    q = tuple(FieldPoly.from_int(e, b) for e in encodings)
    if store is not None:
        store.store_poly(b, m, p.coeffs, w.alpha, w.gamma_spec, tuple(qj.coeffs for qj in q))
    return PolyLattice(b=b, m=m, p=p, q=q)


def poly_was_cached(
    m: int, d: int, w: ProductWeights, b: int = 2, p: FieldPoly | None = None
) -> bool:
    store = VectorRecordStore(settings.cache.vector_path)
    p = p or smallest_irreducible(m, b)
    return store.lookup_poly(b, m, p.coeffs, d, w.alpha, w.gamma_spec) is not None
