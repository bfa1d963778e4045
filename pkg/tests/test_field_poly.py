from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError
from sympy import Poly, divisors, factorint, symbols

from qmc_hyperinterp.exceptions import ConfigError
from qmc_hyperinterp.field_poly import (
    FieldPoly,
    LaurentFraction,
    fibonacci_poly,
    is_irreducible,
    laurent_digits,
    nu_m,
    poly_mul_mod,
    smallest_irreducible,
    tr_m,
)

x = symbols("x")


def _sympy_irreducible(p: FieldPoly) -> bool:
    return Poly(list(reversed(p.coeffs)), x, modulus=p.b).is_irreducible


class TestFieldPoly:
    def test_integer_encoding(self):
        p = FieldPoly.from_int(11, 2)
        assert p.coeffs == (1, 1, 0, 1)
        assert p.to_int() == 11
        assert p.degree == 3
        assert str(p) == "x^3+x+1"

    def test_coefficients_reduced(self):
        p = FieldPoly(b=3, coeffs=(4, 3, 0))
        assert p.coeffs == (1,)
        assert FieldPoly.zero(3).degree == -1

    def test_non_prime_base(self):
        with pytest.raises(ValidationError):
            FieldPoly(b=4, coeffs=(1,))

    def test_base_mismatch(self):
        with pytest.raises(ValueError):
            FieldPoly.one(2) + FieldPoly.one(3)

    def test_frobenius_square(self):
        x1 = FieldPoly.from_int(3, 2)
        assert x1 * x1 == FieldPoly(b=2, coeffs=(1, 0, 1))

    def test_subtraction_inverts_addition(self):
        a, c = FieldPoly.from_int(100, 3), FieldPoly.from_int(47, 3)
        assert (a + c) - c == a
        assert a - a == FieldPoly.zero(3)

    @pytest.mark.parametrize("b", [2, 3, 5])
    def test_division_identity(self, b):
        rng = np.random.default_rng(b)
        for _ in range(50):
            a = FieldPoly.from_int(int(rng.integers(0, b**7)), b)
            p = FieldPoly.from_int(int(rng.integers(b, b**4)), b)
            q, r = divmod(a, p)
            assert q * p + r == a
            assert r.degree < p.degree
            assert a % p == r
            assert a // p == q

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            divmod(FieldPoly.one(2), FieldPoly.zero(2))

    def test_mul_mod(self):
        p = FieldPoly.from_int(11, 2)
        a, c = FieldPoly.from_int(6, 2), FieldPoly.from_int(5, 2)
        assert poly_mul_mod(a, c, p) == (a * c) % p
        with pytest.raises(ConfigError):
            poly_mul_mod(a, c, FieldPoly.zero(2))

    @pytest.mark.parametrize("b", [2, 3, 5])
    def test_ring_laws(self, b):
        rng = np.random.default_rng(100 + b)
        zero, one = FieldPoly.zero(b), FieldPoly.one(b)
        for _ in range(60):
            p, q, r = (FieldPoly.from_int(int(n), b) for n in rng.integers(0, b**6, size=3))
            assert (p + q) + r == p + (q + r)
            assert p + q == q + p
            assert (p * q) * r == p * (q * r)
            assert p * q == q * p
            assert p * (q + r) == p * q + p * r
            assert p + zero == p
            assert p * one == p
            assert p * zero == zero

    @pytest.mark.parametrize("b", [2, 3, 5])
    def test_product_matches_sympy(self, b):
        rng = np.random.default_rng(200 + b)
        for _ in range(30):
            p, q = (FieldPoly.from_int(int(n), b) for n in rng.integers(1, b**5, size=2))
            expected = Poly(list(reversed(p.coeffs)), x, modulus=b) * Poly(
                list(reversed(q.coeffs)), x, modulus=b
            )
            coeffs = tuple(int(c) % b for c in reversed(expected.all_coeffs()))
            assert (p * q).coeffs == coeffs


class TestIrreducibility:
    @pytest.mark.parametrize("b,max_degree", [(2, 7), (3, 4), (5, 3)])
    def test_matches_sympy(self, b, max_degree):
        for n in range(b, b ** (max_degree + 1)):
            p = FieldPoly.from_int(n, b)
            if p.coeffs[-1] != 1:
                continue
            assert is_irreducible(p) == _sympy_irreducible(p), str(p)

    @pytest.mark.parametrize("m,expected", [(1, 2), (2, 7), (3, 11), (4, 19), (5, 37)])
    def test_smallest_binary(self, m, expected):
        assert smallest_irreducible(m, 2).to_int() == expected

    @pytest.mark.parametrize("b", [2, 3])
    @pytest.mark.parametrize("m", range(1, 7))
    def test_count_of_monic_irreducibles(self, b, m):
        def mobius(n: int) -> int:
            exponents = factorint(n).values()
            return 0 if any(e > 1 for e in exponents) else (-1) ** len(exponents)

        expected = sum(mobius(k) * b ** (m // k) for k in divisors(m)) // m
        # monic of degree m encode as b^m .. 2 b^m - 1
        count = sum(is_irreducible(FieldPoly.from_int(n, b)) for n in range(b**m, 2 * b**m))
        assert count == expected

    def test_constant_rejected(self):
        with pytest.raises(ConfigError):
            is_irreducible(FieldPoly.one(2))


class TestFibonacci:
    def test_first_terms_binary(self):
        assert fibonacci_poly(1, 2) == FieldPoly.one(2)
        assert fibonacci_poly(2, 2) == FieldPoly.monomial(1, 2)
        assert fibonacci_poly(3, 2) == FieldPoly(b=2, coeffs=(1, 0, 1))
        assert fibonacci_poly(4, 2) == FieldPoly.monomial(3, 2)

    @pytest.mark.parametrize("n", range(1, 12))
    def test_degree(self, n):
        assert fibonacci_poly(n, 2).degree == n - 1

    @pytest.mark.parametrize("n", range(2, 12))
    def test_consecutive_coprime(self, n):
        # gcd via the Euclidean algorithm on F_2[x]
        a, c = fibonacci_poly(n + 1, 2), fibonacci_poly(n, 2)
        while not c.is_zero():
            a, c = c, a % c
        assert a == FieldPoly.one(2)

    def test_invalid_index(self):
        with pytest.raises(ConfigError):
            fibonacci_poly(0, 2)


class TestLaurent:
    def test_geometric_expansion(self):
        frac = LaurentFraction(numerator=FieldPoly.one(2), denominator=FieldPoly.from_int(3, 2))
        assert laurent_digits(frac, 6) == [1] * 6
        assert nu_m(frac, 3) == Fraction(7, 8)

    def test_monomial_denominator(self):
        frac = LaurentFraction(numerator=FieldPoly.one(2), denominator=FieldPoly.monomial(2, 2))
        assert laurent_digits(frac, 4) == [0, 1, 0, 0]

    def test_expansion_inverts_multiplication(self):
        # (num / den) * den must reproduce num up to the truncation
        b, m = 3, 6
        den = smallest_irreducible(m, b)
        num = FieldPoly.from_int(200, b)
        digits = laurent_digits(LaurentFraction(numerator=num, denominator=den), 3 * m)
        series = FieldPoly(b=b, coeffs=tuple(reversed(digits)))
        product = series * den
        assert FieldPoly(b=b, coeffs=product.coeffs[3 * m :]) == num

    def test_numerator_reduced(self):
        den = FieldPoly.from_int(7, 2)
        frac = LaurentFraction(numerator=FieldPoly.from_int(13, 2), denominator=den)
        assert frac.numerator == FieldPoly.from_int(13, 2) % den

    def test_zero_denominator(self):
        with pytest.raises(ValidationError):
            LaurentFraction(numerator=FieldPoly.one(2), denominator=FieldPoly.zero(2))

    def test_truncation_map(self):
        assert tr_m(13, 3, 2) == FieldPoly(b=2, coeffs=(1, 0, 1))
        assert tr_m(26, 2, 3) == FieldPoly(b=3, coeffs=(2, 2))
