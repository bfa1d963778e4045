import math
from fractions import Fraction
from unittest.mock import patch

import numpy as np
import pytest
from pydantic import ValidationError

from qmc_hyperinterp.exceptions import ConfigError, ImpossibilityError, ResourceCapError
from qmc_hyperinterp.lattice_rank1 import (
    Rank1Lattice,
    cbc_r,
    cbc_reconstruction,
    cbc_s,
    char_sum,
    char_sum_literal,
    estimate_eta,
    fibonacci_lattice,
    generate_points,
    gram_matrix,
    is_dual,
    lattice_eta,
    r_cbc_bound,
    r_criterion,
    s_cbc_bound,
    s_criterion,
    smallest_reconstructing_lattice,
    verify_reconstruction,
)
from qmc_hyperinterp.lattice_rank1.cbc import was_cached
from qmc_hyperinterp.lattice_rank1.criteria import (
    dual_tail_bound,
    kernel_scale,
    korobov_kernel,
    r2_dual_oracle,
    s2_dual_oracle,
)
from qmc_hyperinterp.lattice_rank1.exact import exact_stage_scores
from qmc_hyperinterp.settings import settings
from qmc_hyperinterp.weights_index import IndexSet, ProductWeights, enumerate_box, enumerate_cross


def _assert_stage_optimal(values: np.ndarray, chosen_index: int) -> None:
    best = values.min()
    assert values[chosen_index] <= best * (1 + 1e-9) + 1e-15
    assert np.all(values[:chosen_index] >= values[chosen_index] * (1 - 1e-9))


class TestPoints:
    def test_generate(self):
        points = generate_points(Rank1Lattice(N=5, z=(1, 2)))
        np.testing.assert_array_equal(
            points.numerators, [[0, 0], [1, 2], [2, 4], [3, 1], [4, 3]]
        )
        assert points.denominator == 5

    def test_fibonacci(self):
        L = fibonacci_lattice(11)
        assert (L.N, L.z) == (89, (1, 55))
        points = generate_points(L)
        assert points.size == 89
        assert np.unique(points.numerators[:, 1]).size == 89

    def test_invalid_vector(self):
        with pytest.raises(ValidationError):
            Rank1Lattice(N=7, z=(0, 3))
        with pytest.raises(ValidationError):
            Rank1Lattice(N=7, z=(1, 7))


class TestCharacterSums:
    @pytest.mark.parametrize("N", [2, 3, 5, 8, 13, 16, 31, 64])
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_dichotomy(self, N, d):
        z = tuple(1 + (7 * j) % (N - 1) for j in range(d))
        L = Rank1Lattice(N=N, z=z)
        for h in enumerate_box(d, 3).vectors():
            literal = char_sum_literal(h, L)
            expected = char_sum(h, L)
            assert expected in (0, 1)
            assert abs(literal - expected) <= 1e-12
            assert (expected == 1) == is_dual(h, L)

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigError):
            is_dual((1, 2, 3), Rank1Lattice(N=5, z=(1, 2)))


class TestCriteria:
    def test_kernel_matches_series(self):
        x = np.linspace(0, 1, 17)
        h = np.arange(1, 20001)
        for alpha in (1, 2):
            series = 2 * np.sum(np.cos(2 * np.pi * np.outer(x, h)) / h ** (2.0 * alpha), axis=1)
            np.testing.assert_allclose(korobov_kernel(x, alpha), series, atol=5e-4)

    def test_r_closed_form(self):
        w = ProductWeights.from_spec(1, "const:1")
        value = r_criterion(Rank1Lattice(N=2, z=(1,)), w).value
        assert value**2 == pytest.approx(math.pi**2 / 12, rel=1e-12)

    @pytest.mark.parametrize("N,z", [(7, (1, 3)), (11, (1, 4)), (16, (1, 5)), (13, (1, 5, 8))])
    def test_r_against_dual_sum(self, N, z, unit_weights):
        L = Rank1Lattice(N=N, z=z)
        H = 12 if len(z) == 3 else 40
        r2 = r_criterion(L, unit_weights).value ** 2
        oracle = r2_dual_oracle(L, unit_weights, H)
        assert -1e-12 <= r2 - oracle <= dual_tail_bound(L.d, unit_weights, H) + 1e-12

    @pytest.mark.parametrize("N,z", [(7, (1, 3)), (11, (1, 4))])
    def test_s_against_dual_sum(self, N, z, unit_weights):
        L = Rank1Lattice(N=N, z=z)
        s2 = s_criterion(L, unit_weights).value ** 2
        assert s2 == pytest.approx(s2_dual_oracle(L, unit_weights, 40), rel=1e-3, abs=3e-4)

    def test_non_integer_alpha(self):
        w = ProductWeights.from_spec(1.5, "const:1")
        with pytest.raises(ConfigError):
            r_criterion(Rank1Lattice(N=7, z=(1, 3)), w)


class TestCBC:
    @pytest.mark.timeout(120)
    @pytest.mark.parametrize("N", [127, 509, 2039])
    @pytest.mark.parametrize("d", [2, 4, 8])
    def test_bounds_hold(self, N, d, decaying_weights):
        R = r_criterion(cbc_r(N, d, decaying_weights), decaying_weights).value
        S = s_criterion(cbc_s(N, d, decaying_weights), decaying_weights).value
        assert R <= r_cbc_bound(N, d, decaying_weights)
        assert S <= s_cbc_bound(N, d, decaying_weights)

    @pytest.mark.parametrize("N", [7, 13, 31])
    @pytest.mark.parametrize("kind", ["R", "S"])
    def test_stage_optimal(self, N, kind, decaying_weights):
        search, criterion = (cbc_r, r_criterion) if kind == "R" else (cbc_s, s_criterion)
        L = search(N, 3, decaying_weights)
        assert L.z[0] == 1
        candidates = list(range(1, N))
        for s in range(1, 3):
            values = np.array(
                [
                    criterion(Rank1Lattice(N=N, z=L.z[:s] + (c,)), decaying_weights).value
                    for c in candidates
                ]
            )
            _assert_stage_optimal(values, candidates.index(L.z[s]))

    def test_symmetric_tie_takes_smallest(self, unit_weights):
        L = cbc_r(13, 2, unit_weights)
        assert L.z[1] <= 13 // 2

    def test_prime_required(self, unit_weights):
        with pytest.raises(ConfigError):
            cbc_r(128, 2, unit_weights)

    def test_extensible_in_dimension(self, decaying_weights):
        assert cbc_r(127, 5, decaying_weights).z[:3] == cbc_r(127, 3, decaying_weights).z

    def test_vector_cache(self, decaying_weights):
        first = cbc_s(127, 4, decaying_weights, use_cache=True)
        assert was_cached("S", 127, 4, decaying_weights)
        assert was_cached("S", 127, 2, decaying_weights)
        assert not was_cached("R", 127, 4, decaying_weights)
        with patch("qmc_hyperinterp.lattice_rank1.cbc._cbc_search") as search:
            again = cbc_s(127, 4, decaying_weights, use_cache=True)
        search.assert_not_called()
        assert again == first
        assert settings.cache.vector_path.exists()

    def test_exact_argmin_below_double_precision(self):
        # alpha = 4: T(k) = 30 N^8 B_8(k/N) is an integer, so R^2 needs no rounding
        N = 509
        w = ProductWeights.from_spec(4, "pow:1:3.5")
        L = cbc_r(N, 2, w)
        coeffs = (-1, 0, 20, 0, -70, 0, 140, -120, 30)
        T = [sum(c * k**i * N ** (8 - i) for i, c in enumerate(coeffs)) for k in range(N)]
        g1, g2 = (Fraction(float(g)) for g in w.gammas(2) ** 2)
        scale = Fraction(kernel_scale(4)) / (30 * N**8)
        linear = (g1 + g2) * scale * sum(T) / N

        def r2(z2: int) -> float:
            cross = sum(T[n] * T[n * z2 % N] for n in range(N))
            return float(linear + g1 * g2 * scale**2 * cross / N)

        exact = np.array([r2(z2) for z2 in range(1, N)])
        assert exact.min() < 1e-15
        assert r2(L.z[1]) <= exact.min() * (1 + 1e-9)

    @pytest.mark.parametrize("power", [1, 2])
    def test_exact_scores_match_float_criteria(self, power, decaying_weights):
        N, z = 31, (1, 12)
        criterion = r_criterion if power == 1 else s_criterion
        candidates = np.arange(1, N)
        exact = exact_stage_scores(N, z, decaying_weights, candidates, power)
        floats = [
            criterion(Rank1Lattice(N=N, z=z + (int(c),)), decaying_weights).value ** 2
            for c in candidates
        ]
        np.testing.assert_allclose(exact, floats, rtol=1e-9)


class TestReconstruction:
    def test_acceptance_instances(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            N = int(rng.integers(2, 65))
            d = int(rng.integers(1, 4))
            z = tuple(int(v) for v in rng.integers(1, N, size=d))
            L = Rank1Lattice(N=N, z=z)
            count = int(rng.integers(1, N + 1))
            I = IndexSet.from_vectors(rng.integers(-5, 6, size=(count, d)))
            holds = verify_reconstruction(L, I)
            exact = lattice_eta(L, I)
            assert holds == (exact.eta == 0)
            estimate = estimate_eta(generate_points(L), I)
            if holds:
                assert estimate.eta <= 1e-10
            else:
                assert estimate.eta == pytest.approx(exact.eta, abs=1e-6)

    def test_gram_identity(self):
        I = enumerate_box(2, 2)
        L = smallest_reconstructing_lattice(I)
        assert L.N >= I.size
        assert verify_reconstruction(L, I)
        gram = gram_matrix(generate_points(L), I)
        np.testing.assert_allclose(gram, np.eye(I.size), atol=1e-12)

    def test_search_finds_valid_vector(self):
        I = enumerate_box(3, 1)
        L = cbc_reconstruction(101, 3, I)
        assert L is not None
        assert L.z[0] == 1
        assert verify_reconstruction(L, I)

    def test_search_can_fail(self):
        # every unit z mod 25 has a + z b = 0 mod 25 for some 0 < max(|a|, |b|) <= 4
        assert cbc_reconstruction(25, 2, enumerate_box(2, 2)) is None

    def test_more_frequencies_than_points(self):
        with pytest.raises(ImpossibilityError):
            cbc_reconstruction(7, 2, enumerate_box(2, 2))
        with pytest.raises(ImpossibilityError):
            verify_reconstruction(Rank1Lattice(N=7, z=(1, 3)), enumerate_box(2, 2))

    def test_walsh_set_rejected(self):
        I = IndexSet.from_vectors([(0,), (1,)], basis_kind="walsh")
        with pytest.raises(ConfigError):
            verify_reconstruction(Rank1Lattice(N=5, z=(1,)), I)

    def test_gram_cap(self, monkeypatch):
        monkeypatch.setattr(settings.compute, "max_gram_dim", 4)
        L = Rank1Lattice(N=31, z=(1, 12))
        with pytest.raises(ResourceCapError):
            estimate_eta(generate_points(L), enumerate_box(2, 1))

    def test_aliasing_pair_has_unit_eta(self):
        L = Rank1Lattice(N=2, z=(1,))
        I = IndexSet.from_vectors([(0,), (2,)])
        assert estimate_eta(generate_points(L), I).eta == pytest.approx(1.0, abs=1e-10)
        assert lattice_eta(L, I).eta == pytest.approx(1.0, abs=1e-12)
        assert not verify_reconstruction(L, I)

    def test_eta_trend_over_cbc_lattices(self):
        w = ProductWeights.from_spec(1, "const:1")
        I = enumerate_cross(2, 50, w)
        etas = [lattice_eta(cbc_s(N, 2, w), I).eta for N in (127, 257, 509, 1021)]
        inversions = [k for k in range(3) if etas[k + 1] > etas[k]]
        assert len(inversions) <= 1
        for k in inversions:
            assert etas[k + 1] <= 1.1 * etas[k]
        assert etas[-1] <= etas[0]
