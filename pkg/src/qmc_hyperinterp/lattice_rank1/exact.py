"""
Exact re-scoring of CBC candidates whose criteria sit under double precision.

For integer alpha the kernel is K(k/N) = u T(k) with integers T(k) and one
real scale u. Float weights are dyadic, gamma_j^2 = p_j / G, so every stage
score is a polynomial in v = u / G whose coefficients are integer sums over
the lattice. Only v is irrational; it is taken to PRECISION_DIGITS digits.
"""

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from sympy import pi
from sympy import zeta as exact_zeta

from qmc_hyperinterp.weights_index import ProductWeights

from .criteria import BERNOULLI

PRECISION_DIGITS = 80

Poly = list[np.ndarray]


def _to_fraction(expr) -> Fraction:
    return Fraction(str(expr.evalf(PRECISION_DIGITS)))


@lru_cache(maxsize=8)
def kernel_integers(N: int, alpha: int) -> tuple[np.ndarray, Fraction]:
    """T(k) for k = 0..N-1 as Python ints, and u with K(k/N) = u T(k)"""
    degree = 2 * alpha
    coeffs = BERNOULLI[degree]
    lcm = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * lcm) for c in coeffs]
    T = np.empty(N, dtype=object)
    for k in range(N):
        T[k] = sum(c * k**i * N ** (degree - i) for i, c in enumerate(ints))
    scale = (-1) ** (alpha + 1) * _to_fraction((2 * pi) ** degree) / math.factorial(degree)
    return T, scale / (lcm * N**degree)


def dyadic_weights(gamma2: np.ndarray) -> tuple[list[int], int]:
    """gamma_j^2 = p_j / G with one common denominator G"""
    fractions = [Fraction(float(g)) for g in gamma2]
    G = math.lcm(*(f.denominator for f in fractions))
    return [int(f * G) for f in fractions], G


def _increment(values: np.ndarray, power: int) -> Poly:
    """Coefficients in v of (1 + x v)^power - 1"""
    zero = np.zeros(values.size, dtype=object)
    return [zero, values] if power == 1 else [zero, 2 * values, values * values]


def _extend(excess: Poly, increment: Poly) -> Poly:
    """Coefficients of (1 + Q)(1 + A) - 1"""
    out = [np.zeros(excess[0].size, dtype=object) for _ in range(len(excess) + len(increment) - 1)]
    for i, q in enumerate(excess):
        out[i] = out[i] + q
    for j, a in enumerate(increment):
        out[j] = out[j] + a
    for i in range(1, len(excess)):
        for j in range(1, len(increment)):
            out[i + j] = out[i + j] + excess[i] * increment[j]
    return out


def _horner(sums: list[int], v: Fraction) -> Fraction:
    total = Fraction(0)
    for coeff in reversed(sums):
        total = total * v + coeff
    return total


def s_offset_exact(w: ProductWeights, d: int) -> Fraction:
    """prod_j (1 + 2 zeta(4 alpha) gamma_j^4) - 1 with the float gamma_j^2"""
    zeta4 = _to_fraction(exact_zeta(4 * w.integer_alpha))
    total = Fraction(1)
    for g in w.gammas(d) ** 2:
        total *= 1 + 2 * zeta4 * Fraction(float(g)) ** 2
    return total - 1


def exact_stage_scores(
    N: int,
    z: tuple[int, ...],
    w: ProductWeights,
    candidates: np.ndarray,
    power: int,
) -> np.ndarray:
    """
    R^2 (power 1) or S^2 (power 2) of z + (c,) for every candidate c.

    Each value is exact up to the precision of v and rounded to float once.
    """
    s = len(z)
    T, u = kernel_integers(N, w.integer_alpha)
    p, G = dyadic_weights(w.gammas(s + 1) ** 2)
    v = u / G
    n = np.arange(N, dtype=np.int64)
    excess: Poly = [np.zeros(N, dtype=object)]
    for j, zj in enumerate(z):
        excess = _extend(excess, _increment(p[j] * T[(n * zj) % N], power))
    excess_sums = [int(np.sum(q)) for q in excess]
    offset = s_offset_exact(w, s + 1) if power == 2 else Fraction(0)

    scores = np.empty(len(candidates))
    for i, c in enumerate(candidates):
        increment = _increment(p[s] * T[(n * int(c)) % N], power)
        sums = [0] * (len(excess) + len(increment) - 1)
        for k, total in enumerate(excess_sums):
            sums[k] += total
        for k, a in enumerate(increment):
            sums[k] += int(np.sum(a))
        for k in range(1, len(excess)):
            for j in range(1, len(increment)):
                sums[k + j] += int(np.dot(excess[k], increment[j]))
        scores[i] = float(_horner(sums, v) / N - offset)
    return scores
