import math
from collections.abc import Callable, Mapping, Sequence

import numpy as np
from loguru import logger

from qmc_hyperinterp.core.basis import basis_matrix
from qmc_hyperinterp.exceptions import AssumptionError, ConfigError, ResourceCapError
from qmc_hyperinterp.hyperinterp import (
    Approximant,
    SampleSet,
    coefficient_vector,
    l2_error_analytic,
    qmc_hyperinterp,
)
from qmc_hyperinterp.types import FrequencyVector, PointSet
from qmc_hyperinterp.weights_index import IndexSet

from .schemas import (
    DenoiseTrial,
    LassoConfig,
    NoiseSpec,
    NoiseStudyReport,
    OptimalityReport,
    PointMode,
    ShrinkRule,
)

GRAM_TOL = 1e-10
CD_TOL = 1e-12
CD_AGREEMENT = 1e-8
MIN_STUDY_TRIALS = 30
_MAX_DESIGN_ENTRIES = 10**8


def noise_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream, bit-reproducible for a given seed"""
    return np.random.Generator(np.random.Philox(seed))


def add_noise(S: SampleSet, spec: NoiseSpec) -> SampleSet:
    """f(x_n) + eps_n with eps_n ~ N(0, sigma^2) i.i.d."""
    sigma = spec.resolve_sigma(S.values)
    if sigma == 0.0:
        return S
    eps = noise_rng(spec.seed).standard_normal(S.size) * sigma
    return SampleSet(points=S.points, values=S.values + eps)


def soft_threshold(a, k: float, rule: ShrinkRule = "modulus"):
    """
    eta_S(a, k) = max(0, a - k) + min(0, a + k) on reals; complex values shrink
    their modulus, (|a| - k)_+ a / |a|, or each of Re and Im with "componentwise".
    """
    if k < 0:
        raise ConfigError(f"threshold must be non-negative, got {k}")
    arr = np.asarray(a)
    if not np.iscomplexobj(arr):
        arr = arr.astype(np.float64)
        out = np.maximum(0.0, arr - k) + np.minimum(0.0, arr + k)
        return float(out) if out.ndim == 0 else out
    if rule == "componentwise":
        out = soft_threshold(arr.real, k) + 1j * soft_threshold(arr.imag, k)
    else:
        modulus = np.abs(arr)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(modulus > k, (modulus - k) / modulus, 0.0)
        out = arr * scale
    out = np.asarray(out, dtype=np.complex128)
    return complex(out) if out.ndim == 0 else out


def lasso_qmc_hyperinterp(
    S: SampleSet, I: IndexSet, cfg: LassoConfig, b: int = 2
) -> Approximant:
    """Soft-thresholded QMC hyperinterpolation coefficients"""
    plain = qmc_hyperinterp(S, I, b=b)
    return shrink_approximant(plain, cfg)


def shrink_approximant(A: Approximant, cfg: LassoConfig) -> Approximant:
    return Approximant(
        basis_kind=A.basis_kind,
        index_set=A.index_set,
        coefficients=soft_threshold(A.coefficients, cfg.lam, cfg.complex_rule),
        source="lasso",
        lam=cfg.lam,
        b=A.b,
    )


def design_matrix(points: PointSet, I: IndexSet, b: int = 2) -> np.ndarray:
    """X[n, k] = q_{h_k}(x_n)"""
    if points.size * I.size > _MAX_DESIGN_ENTRIES:
        raise ResourceCapError(f"design matrix {points.size} x {I.size} is too large")
    return basis_matrix(points, I.members, I.basis_kind, b)


def lasso_objective(beta: np.ndarray, X: np.ndarray, y: np.ndarray, lam: float) -> float:
    """(1/(2N)) ||y - X beta||^2 + lam ||beta||_1"""
    N = X.shape[0]
    residual = y - X @ beta
    return float(np.vdot(residual, residual).real / (2 * N) + lam * np.sum(np.abs(beta)))


def lasso_closed_form(X: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    """Minimiser of the objective when X* X = N Id"""
    return soft_threshold(X.conj().T @ y / X.shape[0], lam).astype(np.complex128)


def gram_deviation(X: np.ndarray) -> float:
    """max |X* X / N - Id|"""
    G = X.conj().T @ X / X.shape[0]
    return float(np.max(np.abs(G - np.eye(G.shape[0])))) if G.size else 0.0


def coordinate_descent_lasso(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    tol: float = CD_TOL,
    max_iter: int = 10_000,
) -> tuple[np.ndarray, int]:
    """Cyclic coordinate descent on the Lasso objective, no Gram assumption"""
    N, K = X.shape
    beta = np.zeros(K, dtype=np.complex128)
    residual = np.asarray(y, dtype=np.complex128).copy()
    col_norms = np.sum(np.abs(X) ** 2, axis=0) / N
    for sweep in range(1, max_iter + 1):
        largest_step = 0.0
        for k in range(K):
            if col_norms[k] == 0:
                continue
            xk = X[:, k]
            rho = np.vdot(xk, residual) / N + col_norms[k] * beta[k]
            new = soft_threshold(complex(rho), lam) / col_norms[k]
            step = new - beta[k]
            if step != 0:
                residual -= xk * step
                beta[k] = new
                largest_step = max(largest_step, abs(step))
        if largest_step <= tol:
            return beta, sweep
    logger.warning(f"coordinate descent stopped after {max_iter} sweeps")
    return beta, max_iter


def verify_lasso_optimality(
    S: SampleSet,
    I: IndexSet,
    lam: float,
    b: int = 2,
    perturbations: int = 1000,
    radius: float = 0.1,
    seed: int = 0,
) -> OptimalityReport:
    """
    Certify that eta_S(X* y / N, lam) minimises the Lasso objective.

    The points of S must make X* X / N the identity (reconstruction points).
    """
    X = design_matrix(S.points, I, b)
    deviation = gram_deviation(X)
    if deviation > GRAM_TOL:
        raise AssumptionError(
            f"Gram deviation {deviation:.3e} exceeds {GRAM_TOL}: points are not exact for I"
        )
    y = S.values.astype(np.complex128)
    beta = lasso_closed_form(X, y, lam)
    objective = lasso_objective(beta, X, y, lam)

    rng = noise_rng(seed)
    worst = math.inf
    for _ in range(perturbations):
        delta = rng.standard_normal(I.size) + 1j * rng.standard_normal(I.size)
        delta *= radius * rng.uniform() / max(np.linalg.norm(delta), 1e-300)
        worst = min(worst, lasso_objective(beta + delta, X, y, lam))

    oracle, sweeps = coordinate_descent_lasso(X, y, lam)
    difference = float(np.max(np.abs(oracle - beta))) if I.size else 0.0
    report = OptimalityReport(
        lam=lam,
        gram_deviation=deviation,
        objective=objective,
        min_perturbed_objective=worst,
        perturbations=perturbations,
        perturbation_ok=objective <= worst + 1e-12 * max(1.0, abs(objective)),
        cd_max_difference=difference,
        cd_iterations=sweeps,
        cd_agrees=difference <= CD_AGREEMENT,
    )
    logger.debug(f"lasso optimality at lambda={lam}: {report}")
    return report


def sample_for_mode(
    f: Callable[[PointSet], np.ndarray],
    construction_points: PointSet,
    noise: NoiseSpec,
    mode: PointMode = "fresh",
    fresh_points: PointSet | None = None,
) -> SampleSet:
    """
    Noisy data for the Lasso theorem. "fresh" samples anew on separate
    exactness points, "same" reuses the construction points.
    """
    if mode == "fresh":
        if fresh_points is None:
            raise ConfigError("fresh mode needs its own exactness points")
        points = fresh_points
    else:
        points = construction_points
    clean = SampleSet(points=points, values=f(points))
    return add_noise(clean, noise)


def noise_expectation_study(
    clean: SampleSet,
    I: IndexSet,
    sigma: float,
    trials: int,
    seed: int = 0,
    b: int = 2,
) -> NoiseStudyReport:
    """Monte-Carlo mean of ||Q_I f_eps - Q_I f|| against sigma sqrt(|I| / N)"""
    if trials < MIN_STUDY_TRIALS:
        raise ConfigError(f"the noise study needs at least {MIN_STUDY_TRIALS} trials")
    base = qmc_hyperinterp(clean, I, b=b).coefficients
    errors = np.zeros(trials)
    if sigma > 0:
        for t in range(trials):
            noisy = add_noise(clean, NoiseSpec(sigma=sigma, seed=seed + t))
            errors[t] = np.linalg.norm(qmc_hyperinterp(noisy, I, b=b).coefficients - base)
    report = NoiseStudyReport(
        sigma=sigma,
        trials=trials,
        seed=seed,
        n_points=clean.size,
        index_size=I.size,
        mean_error=float(np.mean(errors)),
        mean_square_error=float(np.mean(errors**2)),
        bound=sigma * math.sqrt(I.size / clean.size),
    )
    logger.info(
        f"noise study sigma={sigma:g}: mean/bound={report.ratio_mean:.4f}, "
        f"mean-square/bound^2={report.ratio_mean_square:.4f}"
    )
    return report


def denoise_trials(
    clean: SampleSet,
    I: IndexSet,
    noise: NoiseSpec,
    lam: float,
    trials: int,
    fhat: Mapping[FrequencyVector, complex] | np.ndarray,
    f_norm_sq: float,
    b: int = 2,
) -> list[DenoiseTrial]:
    """Plain and Lasso L2 errors on independently seeded noisy copies of clean"""
    if trials < 1:
        raise ConfigError("at least one trial is needed")
    exact = fhat if isinstance(fhat, np.ndarray) else coefficient_vector(fhat, I)
    sigma = noise.resolve_sigma(clean.values)
    bound = sigma * math.sqrt(I.size / clean.size)
    cfg = LassoConfig(lam=lam)
    rows = []
    for t in range(trials):
        spec = noise.for_trial(t)
        noisy = add_noise(clean, spec)
        plain = qmc_hyperinterp(noisy, I, b=b)
        lasso = shrink_approximant(plain, cfg)
        rows.append(
            DenoiseTrial(
                trial=t,
                seed=spec.seed,
                l2_noisy=l2_error_analytic(plain, exact, f_norm_sq),
                l2_lasso=l2_error_analytic(lasso, exact, f_norm_sq),
                bound=bound,
                lam=lam,
                sigma=sigma,
                nonzero=lasso.nonzero_count(),
            )
        )
        logger.debug(f"trial {t}: plain={rows[-1].l2_noisy:.4e} lasso={rows[-1].l2_lasso:.4e}")
    return rows


def scan_lambda(
    clean: SampleSet,
    I: IndexSet,
    noise: NoiseSpec,
    lams: Sequence[float],
    fhat: Mapping[FrequencyVector, complex] | np.ndarray,
    f_norm_sq: float,
    trials: int = 1,
    b: int = 2,
) -> list[DenoiseTrial]:
    """
    Trials for every lambda of a grid. The noisy copies are shared across the
    grid, so only the plain coefficients of each trial are computed once.
    """
    exact = fhat if isinstance(fhat, np.ndarray) else coefficient_vector(fhat, I)
    sigma = noise.resolve_sigma(clean.values)
    bound = sigma * math.sqrt(I.size / clean.size)
    rows = []
    for t in range(trials):
        spec = noise.for_trial(t)
        plain = qmc_hyperinterp(add_noise(clean, spec), I, b=b)
        l2_noisy = l2_error_analytic(plain, exact, f_norm_sq)
        for lam in lams:
            lasso = shrink_approximant(plain, LassoConfig(lam=lam))
            rows.append(
                DenoiseTrial(
                    trial=t,
                    seed=spec.seed,
                    l2_noisy=l2_noisy,
                    l2_lasso=l2_error_analytic(lasso, exact, f_norm_sq),
                    bound=bound,
                    lam=lam,
                    sigma=sigma,
                    nonzero=lasso.nonzero_count(),
                )
            )
    return rows
