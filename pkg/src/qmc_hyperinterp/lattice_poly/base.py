from collections.abc import Sequence
from fractions import Fraction

import numpy as np

from qmc_hyperinterp.core.basis import frequency_digits, unit_roots, walsh_exponents
from qmc_hyperinterp.core.numerics import neumaier_sum
from qmc_hyperinterp.exceptions import ConfigError
from qmc_hyperinterp.field_poly import (
    FieldPoly,
    LaurentFraction,
    fibonacci_poly,
    laurent_digits,
    poly_mul_mod,
    tr_m,
)
from qmc_hyperinterp.types import PointSet

from .schemas import PolyLattice, WalshValue


def expansion_digits(q: FieldPoly, p: FieldPoly) -> np.ndarray:
    """Digits a_1..a_{2m-1} of q/p, enough to fill the m x m Hankel generating matrix"""
    m = p.degree
    frac = LaurentFraction(numerator=q, denominator=p)
    return np.array(laurent_digits(frac, 2 * m - 1), dtype=np.int64)


def hankel_index(m: int) -> np.ndarray:
    """C[t, i] = a_{t+i+1}, i.e. index t + i into the digit row"""
    return np.add.outer(np.arange(m), np.arange(m))


def coordinate_numerators(digit_rows: np.ndarray, m: int, b: int) -> np.ndarray:
    """
    Numerators over b^m of nu_m(h q / p) for every h in 0..b^m-1.

    digit_rows has shape (k, 2m-1), one Laurent digit row per generating
    polynomial; the result has shape (k, b^m).
    """
    digit_rows = np.atleast_2d(digit_rows)
    hd = frequency_digits(np.arange(b**m, dtype=np.int64), m, b)
    matrices = digit_rows[:, hankel_index(m)]
    xd = np.einsum("hi,cti->cht", hd, matrices) % b
    powers = b ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return xd @ powers


def generate_poly_points(PL: PolyLattice) -> PointSet:
    """Point h has coordinates nu_m(h(x) q_j(x) / p(x)), h in integer-encoding order"""
    rows = np.stack([expansion_digits(qj, PL.p) for qj in PL.q])
    numerators = coordinate_numerators(rows, PL.m, PL.b).T
    return PointSet(numerators=numerators, denominator=PL.n_points)


def fibonacci_poly_lattice(m: int, b: int = 2) -> PolyLattice:
    """p = F_{m+1} (degree m), q = (1, F_m)"""
    if m < 2:
        raise ConfigError("Fibonacci polynomial lattices need m >= 2")
    return PolyLattice(
        b=b,
        m=m,
        p=fibonacci_poly(m + 1, b),
        q=(FieldPoly.one(b), fibonacci_poly(m, b)),
    )


def equidistant_lattice(m: int, b: int = 2) -> PolyLattice:
    """Modulus x^m with q = (1): the grid {h / b^m}"""
    return PolyLattice(b=b, m=m, p=FieldPoly.monomial(m, b), q=(FieldPoly.one(b),))


def _digits_of(x: Fraction, b: int) -> list[int]:
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ConfigError(f"walsh functions are evaluated on [0, 1), got {x}")
    digits = []
    while x:
        if len(digits) > 64:
            raise ConfigError(f"{x} has no finite base-{b} expansion")
        x *= b
        digit = int(x)
        digits.append(digit)
        x -= digit
    return digits


def wal(h: int, x: Fraction, b: int = 2) -> WalshValue:
    """wal_h(x) = exp(2 pi i (h_0 x_1 + h_1 x_2 + ...) / b)"""
    if h < 0:
        raise ConfigError("walsh frequencies must be non-negative")
    exponent = 0
    for digit in _digits_of(x, b):
        if not h:
            break
        h, hk = divmod(h, b)
        exponent += hk * digit
    return WalshValue(exponent=exponent, b=b)


def wal_multi(h: Sequence[int], x: Sequence[Fraction], b: int = 2) -> WalshValue:
    if len(h) != len(x):
        raise ConfigError(f"frequency has d={len(h)}, point has d={len(x)}")
    value = WalshValue(exponent=0, b=b)
    for hj, xj in zip(h, x):
        value = value * wal(hj, xj, b)
    return value


def _check_dim(h: Sequence[int], PL: PolyLattice) -> None:
    if len(h) != PL.d:
        raise ConfigError(f"frequency has d={len(h)}, lattice has d={PL.d}")


def is_dual_poly(h: Sequence[int], PL: PolyLattice) -> bool:
    """sum_j tr_m(h_j) q_j == 0 (mod p)"""
    _check_dim(h, PL)
    total = FieldPoly.zero(PL.b)
    for hj, qj in zip(h, PL.q):
        if hj < 0:
            raise ConfigError("walsh frequencies must be non-negative")
        total = total + poly_mul_mod(tr_m(hj, PL.m, PL.b), qj, PL.p)
    return (total % PL.p).is_zero()


def walsh_char_sum(h: Sequence[int], PL: PolyLattice) -> complex:
    return 1.0 + 0j if is_dual_poly(h, PL) else 0j


def walsh_char_sum_literal(h: Sequence[int], PL: PolyLattice) -> complex:
    """Average of wal_h over the point set, summed point by point"""
    _check_dim(h, PL)
    points = generate_poly_points(PL)
    exps = walsh_exponents(points, np.array([h], dtype=np.int64), PL.b)[:, 0]
    return complex(neumaier_sum(unit_roots(PL.b)[exps])) / points.size


def residue_maps(PL: PolyLattice) -> list[np.ndarray]:
    """
    M_j with column i the coefficients of x^i q_j mod p, so tr_m(h) q_j mod p
    has digits M_j @ digits(h) mod b.
    """
    maps = []
    for qj in PL.q:
        M = np.zeros((PL.m, PL.m), dtype=np.int64)
        for i in range(PL.m):
            r = poly_mul_mod(FieldPoly.monomial(i, PL.b), qj, PL.p).coeffs
            M[: len(r), i] = r
        maps.append(M)
    return maps


def poly_residues(PL: PolyLattice, members: np.ndarray) -> np.ndarray:
    """Integer encoding of sum_j tr_m(h_j) q_j mod p for every row of members"""
    members = np.atleast_2d(np.asarray(members, dtype=np.int64))
    if members.shape[1] != PL.d:
        raise ConfigError(f"frequencies have d={members.shape[1]}, lattice has d={PL.d}")
    digits = np.zeros((members.shape[0], PL.m), dtype=np.int64)
    for j, M in enumerate(residue_maps(PL)):
        digits += frequency_digits(members[:, j], PL.m, PL.b) @ M.T
    return (digits % PL.b) @ (PL.b ** np.arange(PL.m, dtype=np.int64))


def verify_poly_reconstruction(PL: PolyLattice, members: np.ndarray) -> bool:
    """Pairwise distinct residues, which makes the Walsh Gram matrix the identity"""
    residues = poly_residues(PL, members)
    return np.unique(residues).size == residues.size
