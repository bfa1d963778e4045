import math
from collections.abc import Mapping, Sequence
from fractions import Fraction
from typing import Literal

import numpy as np
from loguru import logger

from qmc_hyperinterp.core.basis import basis_matrix
from qmc_hyperinterp.core.numerics import neumaier_sum
from qmc_hyperinterp.exceptions import AssumptionError, ConfigError
from qmc_hyperinterp.lattice_rank1 import Rank1Lattice, generate_points
from qmc_hyperinterp.types import BasisKind, FrequencyVector, PointSet
from qmc_hyperinterp.weights_index import IndexSet

from .schemas import Approximant, ApproximantSource, BoundReport, SampleSet

# entries of the (N x block) basis slab evaluated at once
_SLAB_ENTRIES = 1 << 22
IMAG_RESIDUE_TOL = 1e-8
BESSEL_TOL = 1e-9
RADICAND_CLAMP = 1e-12
_MAX_DIGITS = 30


def _check_dims(S: SampleSet, d: int) -> None:
    if S.dim != d:
        raise ConfigError(f"samples have d={S.dim}, frequencies have d={d}")


def discrete_inner(
    S: SampleSet, h: FrequencyVector, basis_kind: BasisKind = "trig", b: int = 2
) -> complex:
    """<v, q_h>_N = (1/N) sum_n v(x_n) conj(q_h(x_n)), compensated"""
    _check_dims(S, len(h))
    column = basis_matrix(S.points, np.array([h], dtype=np.int64), basis_kind, b)[:, 0]
    return complex(neumaier_sum(S.values * np.conj(column))) / S.size


def _direct_coefficients(S: SampleSet, I: IndexSet, b: int) -> np.ndarray:
    coeffs = np.zeros(I.size, dtype=np.complex128)
    block = max(1, _SLAB_ENTRIES // S.size)
    for start in range(0, I.size, block):
        B = basis_matrix(S.points, I.members[start : start + block], I.basis_kind, b)
        coeffs[start : start + B.shape[1]] = neumaier_sum(S.values[:, None] * np.conj(B)) / S.size
    return coeffs


def _fft_coefficients(S: SampleSet, I: IndexSet, lattice: Rank1Lattice) -> np.ndarray:
    """On a rank-1 lattice c_h = DFT(v)[h.z mod N] / N"""
    expected = generate_points(lattice)
    if S.points.denominator != lattice.N or not np.array_equal(
        S.points.numerators, expected.numerators
    ):
        raise ConfigError("the fft path needs the samples in lattice order")
    spectrum = np.fft.fft(S.values) / lattice.N
    residues = (I.members % lattice.N) @ np.array(lattice.z, dtype=np.int64) % lattice.N
    return spectrum[residues]


def qmc_hyperinterp(
    S: SampleSet,
    I: IndexSet,
    b: int = 2,
    method: Literal["direct", "fft"] = "direct",
    lattice: Rank1Lattice | None = None,
    source: ApproximantSource = "qmc",
) -> Approximant:
    """
    c_h = <f, q_h>_N for every h in I.

    On points with the reconstruction property this is the classical
    hyperinterpolation operator; pass source="classical" to label it so.
    """
    _check_dims(S, I.dim)
    if method == "fft":
        if I.basis_kind != "trig" or lattice is None:
            raise ConfigError("the fft path needs a trig index set and its rank-1 lattice")
        coeffs = _fft_coefficients(S, I, lattice)
    else:
        coeffs = _direct_coefficients(S, I, b)
    logger.debug(f"{source} hyperinterpolation: N={S.size} |I|={I.size} via {method}")
    return Approximant(
        basis_kind=I.basis_kind, index_set=I, coefficients=coeffs, source=source, b=b
    )


def coefficient_vector(
    A: Approximant | Mapping[FrequencyVector, complex], I: IndexSet | None = None
) -> np.ndarray:
    """Coefficients aligned to I (default: the approximant's own index set)"""
    if isinstance(A, Approximant):
        if I is None:
            return A.coefficients.copy()
        return np.array([A.coefficient(h) for h in I.vectors()], dtype=np.complex128)
    if I is None:
        raise ConfigError("a coefficient map needs an index set to align to")
    try:
        return np.array([A[h] for h in I.vectors()], dtype=np.complex128)
    except KeyError as e:
        raise ConfigError(f"coefficient map misses frequency {e.args[0]}") from e


def evaluate_points(A: Approximant, points: PointSet) -> np.ndarray:
    if points.dim != A.index_set.dim:
        raise ConfigError(f"points have d={points.dim}, approximant has d={A.index_set.dim}")
    if A.index_set.size == 0:
        return np.zeros(points.size, dtype=np.complex128)
    out = np.zeros(points.size, dtype=np.complex128)
    block = max(1, _SLAB_ENTRIES // max(A.index_set.size, 1))
    for start in range(0, points.size, block):
        chunk = PointSet(
            numerators=points.numerators[start : start + block],
            denominator=points.denominator,
        )
        out[start : start + chunk.size] = (
            basis_matrix(chunk, A.index_set.members, A.basis_kind, A.b) @ A.coefficients
        )
    return out


def _as_point_set(x: Sequence, basis_kind: BasisKind, b: int, depth: int | None) -> PointSet:
    if all(isinstance(c, (Fraction, int)) for c in x):
        fracs = [Fraction(c) for c in x]
        den = math.lcm(*(f.denominator for f in fracs))
        if basis_kind == "trig":
            return PointSet(numerators=[[int(f * den) for f in fracs]], denominator=den)
        power = 1
        while power % den and power < b**_MAX_DIGITS:
            power *= b
        if power % den == 0:
            return PointSet(numerators=[[int(f * power) for f in fracs]], denominator=power)
        if depth is None:
            raise ConfigError(f"{x} has no finite base-{b} expansion; pass a depth")
    depth = depth or _MAX_DIGITS
    den = b**depth
    return PointSet(
        numerators=[[int(Fraction(c) * den) for c in x]], denominator=den
    )


def evaluate(A: Approximant, x: Sequence, depth: int | None = None) -> complex:
    """
    sum_h c_h q_h(x) at one point.

    Exact rationals are used as they are. Walsh evaluation of a point with an
    infinite base-b expansion truncates it after `depth` digits.
    """
    if len(x) != A.index_set.dim:
        raise ConfigError(f"point has d={len(x)}, approximant has d={A.index_set.dim}")
    if any(not 0 <= c < 1 for c in x):
        raise ConfigError(f"point {x} is outside [0, 1)^d")
    if A.basis_kind == "trig" and not all(isinstance(c, (Fraction, int)) for c in x):
        return complex(evaluate_float(A, np.array([x], dtype=np.float64))[0])
    return complex(evaluate_points(A, _as_point_set(x, A.basis_kind, A.b, depth))[0])


def evaluate_float(A: Approximant, x: np.ndarray) -> np.ndarray:
    """Trig evaluation at floating-point points, shape (n, d)"""
    if A.basis_kind != "trig":
        raise ConfigError("floating-point evaluation is only defined for the trig basis")
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    phases = x @ A.index_set.members.T.astype(np.float64)
    return np.exp(2j * np.pi * phases) @ A.coefficients


def evaluate_real(A: Approximant, points: PointSet) -> np.ndarray:
    """Real part of the evaluation, for approximants of real data"""
    values = evaluate_points(A, points)
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if residue > IMAG_RESIDUE_TOL:
        raise AssumptionError(f"imaginary residue {residue:.3e} for a real approximant")
    return values.real


def conjugate_symmetry_defect(A: Approximant) -> float:
    """max |c_{-h} - conj(c_h)| over pairs with both +-h in I"""
    if A.basis_kind != "trig":
        raise ConfigError("conjugate symmetry is a property of trig approximants")
    defect = 0.0
    for h, c in A.as_dict().items():
        mirror = tuple(-k for k in h)
        if mirror in A.index_set:
            defect = max(defect, abs(A.coefficient(mirror) - np.conj(c)))
    return defect


def approximant_norm(A: Approximant) -> float:
    """L2 norm by Parseval"""
    return float(np.sqrt(neumaier_sum(np.abs(A.coefficients) ** 2))) if A.index_set.size else 0.0


def l2_error_analytic(
    A: Approximant,
    fhat: Mapping[FrequencyVector, complex] | np.ndarray,
    f_norm_sq: float,
) -> float:
    """
    ||A - f||_2 from the exact coefficients of f on I and ||f||^2:
    sqrt(sum |fhat - c|^2 + ||f||^2 - sum |fhat|^2).
    """
    exact = fhat if isinstance(fhat, np.ndarray) else coefficient_vector(fhat, A.index_set)
    exact = np.asarray(exact, dtype=np.complex128).reshape(-1)
    if exact.shape[0] != A.index_set.size:
        raise ConfigError("exact coefficients do not cover the index set")
    captured = float(neumaier_sum(np.abs(exact) ** 2)) if exact.size else 0.0
    remainder = f_norm_sq - captured
    if remainder < -BESSEL_TOL:
        raise AssumptionError(
            f"Bessel inequality violated: ||f||^2 = {f_norm_sq} < {captured}"
        )
    diff = float(neumaier_sum(np.abs(exact - A.coefficients) ** 2)) if exact.size else 0.0
    radicand = diff + max(remainder, 0.0)
    if radicand < 0:
        if radicand < -RADICAND_CLAMP:
            raise AssumptionError(f"negative squared error {radicand}")
        return 0.0
    return math.sqrt(radicand)


def dense_grid(d: int, per_axis: int) -> PointSet:
    """The regular grid {k / per_axis}^d"""
    side = np.arange(per_axis, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([side] * d), indexing="ij"), axis=-1).reshape(-1, d)
    return PointSet(numerators=grid, denominator=per_axis)


def theorem33_bound_check(
    A: Approximant,
    eta: float,
    f_samples: SampleSet,
    p_star_proxy: Approximant | None = None,
    qmc_points: PointSet | None = None,
) -> BoundReport:
    """
    Advisory check of ||Q_I f||_2 <= sqrt(1 + eta) ||f||_inf.

    The sup norm is taken over f_samples (a dense grid). With a proxy p* for
    the best approximation and the QMC points, the aliasing term
    ||Q_I p* - p*|| and the resulting error bound are reported too.
    """
    norm = approximant_norm(A)
    sup = float(np.max(np.abs(f_samples.values)))
    rhs = math.sqrt(1.0 + eta) * sup
    margin = rhs - norm
    report = {
        "approximant_norm": norm,
        "sup_norm": sup,
        "eta": eta,
        "rhs": rhs,
        "margin": margin,
        "holds": margin >= -1e-10,
    }
    if p_star_proxy is not None:
        grid_values = evaluate_points(p_star_proxy, f_samples.points)
        proxy_error = float(np.max(np.abs(f_samples.values - grid_values)))
        report["proxy_error"] = proxy_error
        if qmc_points is not None:
            resampled = SampleSet(
                points=qmc_points, values=evaluate_points(p_star_proxy, qmc_points)
            )
            projected = qmc_hyperinterp(resampled, p_star_proxy.index_set, b=p_star_proxy.b)
            aliasing = float(np.linalg.norm(projected.coefficients - p_star_proxy.coefficients))
            report["aliasing"] = aliasing
            report["error_bound"] = (math.sqrt(1.0 + eta) + 1.0) * proxy_error + aliasing
    if not report["holds"]:
        logger.warning(f"norm bound fails on the sampled grid: margin {margin:.3e}")
    return BoundReport(**report)


def dumps_approximant(A: Approximant) -> str:
    """Header `basis d |I| provenance [b]`, then `h_1 ... h_d re im` per line"""
    header = f"{A.basis_kind} {A.index_set.dim} {A.index_set.size} {A.provenance}"
    if A.basis_kind == "walsh":
        header += f" {A.b}"
    lines = [header]
    for h, c in zip(A.index_set.members, A.coefficients):
        frequency = " ".join(str(int(k)) for k in h)
        lines.append(f"{frequency} {float(c.real)!r} {float(c.imag)!r}")
    return "\n".join(lines) + "\n"


def _parse_provenance(token: str) -> tuple[ApproximantSource, float | None]:
    if token.startswith("lasso(") and token.endswith(")"):
        return "lasso", float(token[6:-1])
    if token in ("qmc", "classical"):
        return token, None
    raise ConfigError(f"unknown approximant provenance {token!r}")


def loads_approximant(text: str) -> Approximant:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows:
        raise ConfigError("empty approximant document")
    head = rows[0]
    basis_kind, d, count = head[0], int(head[1]), int(head[2])
    source, lam = _parse_provenance(head[3])
    b = int(head[4]) if len(head) > 4 else 2
    body = rows[1:]
    if len(body) != count or any(len(r) != d + 2 for r in body):
        raise ConfigError("approximant document does not match its header")
    members = np.array([r[:d] for r in body], dtype=np.int64).reshape(count, d)
    values = {
        tuple(int(k) for k in r[:d]): complex(float(r[d]), float(r[d + 1])) for r in body
    }
    I = IndexSet(basis_kind=basis_kind, members=members)
    return Approximant(
        basis_kind=basis_kind,
        index_set=I,
        coefficients=coefficient_vector(values, I),
        source=source,
        lam=lam,
        b=b,
    )
