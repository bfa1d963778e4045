from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from qmc_hyperinterp.exceptions import AssumptionError, ConfigError
from qmc_hyperinterp.hyperinterp import (
    Approximant,
    SampleSet,
    approximant_norm,
    coefficient_vector,
    conjugate_symmetry_defect,
    dense_grid,
    discrete_inner,
    dumps_approximant,
    evaluate,
    evaluate_float,
    evaluate_points,
    evaluate_real,
    l2_error_analytic,
    loads_approximant,
    qmc_hyperinterp,
    theorem33_bound_check,
)
from qmc_hyperinterp.lattice_poly import equidistant_lattice, generate_poly_points
from qmc_hyperinterp.lattice_rank1 import (
    Rank1Lattice,
    cbc_reconstruction,
    generate_points,
    smallest_reconstructing_lattice,
    verify_reconstruction,
)
from qmc_hyperinterp.testbed import get_function
from qmc_hyperinterp.weights_index import (
    IndexSet,
    ProductWeights,
    enumerate_box,
    enumerate_cross,
    minkowski_difference,
)


@pytest.fixture
def cross():
    return enumerate_cross(2, 64, ProductWeights.from_spec(1, "pow:1:1"))


@pytest.fixture
def cross_lattice(cross):
    return smallest_reconstructing_lattice(cross)


def _random_approximant(I: IndexSet, rng: np.random.Generator) -> Approximant:
    coeffs = rng.standard_normal(I.size) + 1j * rng.standard_normal(I.size)
    return Approximant(basis_kind=I.basis_kind, index_set=I, coefficients=coeffs)


class TestSampleSet:
    def test_length_mismatch(self):
        points = generate_points(Rank1Lattice(N=5, z=(1, 2)))
        with pytest.raises(ValidationError):
            SampleSet(points=points, values=np.ones(4))

    def test_real_values_stay_real(self):
        points = generate_points(Rank1Lattice(N=5, z=(1, 2)))
        S = SampleSet(points=points, values=[1, 2, 3, 4, 5])
        assert S.values.dtype == np.float64


class TestReconstruction:
    def test_exact_on_trig_polynomials(self, cross, cross_lattice):
        rng = np.random.default_rng(11)
        points = generate_points(cross_lattice)
        for _ in range(100):
            p = _random_approximant(cross, rng)
            S = SampleSet(points=points, values=evaluate_points(p, points))
            Q = qmc_hyperinterp(S, cross)
            np.testing.assert_allclose(Q.coefficients, p.coefficients, atol=1e-10)

    def test_fft_matches_direct(self, cross, cross_lattice):
        points = generate_points(cross_lattice)
        S = get_function("kv").sample(points)
        direct = qmc_hyperinterp(S, cross)
        fast = qmc_hyperinterp(S, cross, method="fft", lattice=cross_lattice)
        np.testing.assert_allclose(fast.coefficients, direct.coefficients, atol=1e-12)

    def test_fft_needs_lattice_order(self, cross, cross_lattice):
        points = generate_points(cross_lattice)
        shuffled = points.model_copy(update={"numerators": points.numerators[::-1].copy()})
        S = SampleSet(points=shuffled, values=np.ones(points.size))
        with pytest.raises(ConfigError):
            qmc_hyperinterp(S, cross, method="fft", lattice=cross_lattice)
        with pytest.raises(ConfigError):
            qmc_hyperinterp(S, cross, method="fft")

    def test_exact_on_walsh_polynomials(self):
        rng = np.random.default_rng(3)
        I = IndexSet.from_vectors([(h,) for h in range(64)], basis_kind="walsh")
        points = generate_poly_points(equidistant_lattice(6))
        for _ in range(20):
            p = _random_approximant(I, rng)
            S = SampleSet(points=points, values=evaluate_points(p, points))
            Q = qmc_hyperinterp(S, I)
            np.testing.assert_allclose(Q.coefficients, p.coefficients, atol=1e-10)

    def test_discrete_inner(self):
        points = generate_points(Rank1Lattice(N=7, z=(1, 3)))
        S = SampleSet(points=points, values=np.ones(7))
        assert discrete_inner(S, (0, 0)) == pytest.approx(1.0)
        assert discrete_inner(S, (1, 0)) == pytest.approx(0.0, abs=1e-14)

    def test_dimension_mismatch(self, cross):
        points = generate_points(Rank1Lattice(N=7, z=(1, 3, 2)))
        S = SampleSet(points=points, values=np.ones(7))
        with pytest.raises(ConfigError):
            qmc_hyperinterp(S, cross)

    def test_classical_label(self, cross, cross_lattice):
        S = get_function("kv").sample(generate_points(cross_lattice))
        assert qmc_hyperinterp(S, cross, source="classical").provenance == "classical"


class TestOperator:
    @pytest.mark.parametrize("method", ["direct", "fft"])
    def test_linear(self, method, cross, cross_lattice):
        rng = np.random.default_rng(13)
        points = generate_points(cross_lattice)

        def Q(values: np.ndarray) -> np.ndarray:
            S = SampleSet(points=points, values=values)
            return qmc_hyperinterp(S, cross, method=method, lattice=cross_lattice).coefficients

        for _ in range(10):
            f, g = rng.standard_normal((2, points.size))
            a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            np.testing.assert_allclose(Q(a * f + b * g), a * Q(f) + b * Q(g), atol=1e-12)

    def test_exact_on_cbc_reconstructing_lattice(self):
        I = enumerate_box(3, 1)
        L = cbc_reconstruction(101, 3, I)
        assert verify_reconstruction(L, I)
        points = generate_points(L)
        rng = np.random.default_rng(14)
        for _ in range(20):
            p = _random_approximant(I, rng)
            S = SampleSet(points=points, values=evaluate_points(p, points))
            Q = qmc_hyperinterp(S, I, method="fft", lattice=L)
            np.testing.assert_allclose(Q.coefficients, p.coefficients, atol=1e-10)

    def test_parseval_matches_lattice_quadrature(self):
        # |A|^2 has frequencies in I - I, which this lattice integrates exactly
        I = enumerate_box(2, 1)
        points = generate_points(smallest_reconstructing_lattice(minkowski_difference(I)))
        rng = np.random.default_rng(15)
        for _ in range(10):
            A = _random_approximant(I, rng)
            quadrature = float(np.mean(np.abs(evaluate_points(A, points)) ** 2))
            assert approximant_norm(A) ** 2 == pytest.approx(quadrature, rel=1e-10)

    def test_analytic_error_is_parseval_distance(self, cross):
        rng = np.random.default_rng(16)
        A, B = _random_approximant(cross, rng), _random_approximant(cross, rng)
        # f = B exactly, so ||A - f|| is the coefficient distance
        distance = float(np.linalg.norm(A.coefficients - B.coefficients))
        assert l2_error_analytic(A, B.coefficients, approximant_norm(B) ** 2) == pytest.approx(
            distance, rel=1e-10
        )
        zero = Approximant(index_set=cross, coefficients=np.zeros(cross.size))
        assert l2_error_analytic(zero, B.coefficients, approximant_norm(B) ** 2) == pytest.approx(
            approximant_norm(B), rel=1e-10
        )


class TestEvaluation:
    def test_exact_and_float_agree(self, cross):
        rng = np.random.default_rng(1)
        A = _random_approximant(cross, rng)
        x = (Fraction(3, 17), Fraction(5, 9))
        exact = evaluate(A, x)
        floating = evaluate_float(A, np.array([[3 / 17, 5 / 9]]))[0]
        assert exact == pytest.approx(floating, abs=1e-10)
        assert evaluate(A, (3 / 17, 5 / 9)) == pytest.approx(floating)

    def test_walsh_depth(self):
        I = IndexSet.from_vectors([(0,), (1,)], basis_kind="walsh")
        A = Approximant(basis_kind="walsh", index_set=I, coefficients=[1.0, 1.0])
        assert evaluate(A, (Fraction(1, 4),)) == pytest.approx(2.0)
        assert evaluate(A, (Fraction(3, 4),)) == pytest.approx(0.0)
        with pytest.raises(ConfigError):
            evaluate(A, (Fraction(1, 3),))
        assert evaluate(A, (Fraction(1, 3),), depth=20) == pytest.approx(2.0)

    def test_outside_unit_cube(self, cross):
        A = _random_approximant(cross, np.random.default_rng(0))
        with pytest.raises(ConfigError):
            evaluate(A, (Fraction(1), Fraction(0)))

    def test_real_data_symmetry(self, cross, cross_lattice):
        points = generate_points(cross_lattice)
        Q = qmc_hyperinterp(get_function("kv").sample(points), cross)
        assert conjugate_symmetry_defect(Q) <= 1e-12
        values = evaluate_real(Q, dense_grid(2, 8))
        assert values.dtype == np.float64

    def test_imaginary_residue(self):
        I = IndexSet.from_vectors([(1,)])
        A = Approximant(index_set=I, coefficients=[1.0])
        with pytest.raises(AssumptionError):
            evaluate_real(A, dense_grid(1, 8))

    def test_coefficient_lookup(self, cross):
        A = _random_approximant(cross, np.random.default_rng(2))
        h = cross.vectors()[3]
        assert A.coefficient(h) == A.coefficients[3]
        assert A.coefficient((1000, 1000)) == 0
        assert A.as_dict()[h] == A.coefficients[3]
        with pytest.raises(ConfigError):
            coefficient_vector({h: 1.0}, cross)


class TestErrors:
    def test_zero_error_for_exact_coefficients(self, cross):
        A = _random_approximant(cross, np.random.default_rng(4))
        norm_sq = float(np.sum(np.abs(A.coefficients) ** 2))
        assert l2_error_analytic(A, A.as_dict(), norm_sq) == pytest.approx(0.0, abs=1e-7)
        assert approximant_norm(A) == pytest.approx(np.sqrt(norm_sq))

    def test_error_includes_tail(self, cross):
        A = _random_approximant(cross, np.random.default_rng(5))
        norm_sq = float(np.sum(np.abs(A.coefficients) ** 2)) + 0.25
        assert l2_error_analytic(A, A.coefficients, norm_sq) == pytest.approx(0.5)

    def test_bessel_violation(self, cross):
        A = _random_approximant(cross, np.random.default_rng(6))
        with pytest.raises(AssumptionError):
            l2_error_analytic(A, A.coefficients, 0.0)

    def test_misaligned_coefficients(self, cross):
        A = _random_approximant(cross, np.random.default_rng(7))
        with pytest.raises(ConfigError):
            l2_error_analytic(A, np.zeros(3), 1.0)

    def test_norm_bound(self, cross, cross_lattice):
        kv = get_function("kv")
        Q = qmc_hyperinterp(kv.sample(generate_points(cross_lattice)), cross)
        grid = kv.sample(dense_grid(2, 64))
        proxy = qmc_hyperinterp(kv.sample(generate_points(cross_lattice)), cross)
        report = theorem33_bound_check(
            Q, 0.0, grid, p_star_proxy=proxy, qmc_points=generate_points(cross_lattice)
        )
        assert report.holds
        assert report.aliasing == pytest.approx(0.0, abs=1e-10)
        assert report.error_bound == pytest.approx(2 * report.proxy_error, abs=1e-10)


class TestSerialisation:
    def test_round_trip(self):
        I = enumerate_box(2, 1)
        rng = np.random.default_rng(8)
        A = Approximant(
            index_set=I,
            coefficients=rng.standard_normal(I.size) + 1j * rng.standard_normal(I.size),
            source="lasso",
            lam=0.125,
        )
        text = dumps_approximant(A)
        assert text.splitlines()[0] == "trig 2 9 lasso(0.125)"
        B = loads_approximant(text)
        assert B.provenance == "lasso(0.125)"
        np.testing.assert_array_equal(B.coefficients, A.coefficients)

    def test_walsh_header(self):
        I = IndexSet.from_vectors([(0,), (1,), (2,)], basis_kind="walsh")
        A = Approximant(basis_kind="walsh", index_set=I, coefficients=[1, 0, 2], b=3)
        B = loads_approximant(dumps_approximant(A))
        assert (B.basis_kind, B.b, B.provenance) == ("walsh", 3, "qmc")

    def test_complex128_values_written_as_plain_floats(self):
        I = enumerate_box(1, 1)
        values = np.array([1 / 3 - 1.738266398496882j, -0.0 + 1e-300j, 2.5e17 + 0j])
        A = Approximant(index_set=I, coefficients=values.astype(np.complex128))
        text = dumps_approximant(A)
        assert "np." not in text
        assert text.splitlines()[1].split()[1:] == [repr(1 / 3), "-1.738266398496882"]
        np.testing.assert_array_equal(loads_approximant(text).coefficients, values)

    def test_lasso_needs_lambda(self):
        with pytest.raises(ValidationError):
            Approximant(index_set=enumerate_box(1, 1), coefficients=[0, 0, 0], source="lasso")

    def test_unknown_provenance(self):
        with pytest.raises(ConfigError):
            loads_approximant("trig 1 1 ridge\n0 1.0 0.0\n")
