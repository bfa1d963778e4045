"""
Experiment runners behind the `qmch` subcommands.

Every runner takes a resolved ExperimentConfig and returns plain result
objects (pandas frames or pydantic reports); writing files is left to
`write_table` so that output headers are stamped in one place.
"""

import hashlib
import math
import time
from functools import partial
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger
from sympy import nextprime

from qmc_hyperinterp.core.records import VectorRecordStore
from qmc_hyperinterp.exceptions import ConfigError, ImpossibilityError
from qmc_hyperinterp.hyperinterp import SampleSet, l2_error_analytic, qmc_hyperinterp
from qmc_hyperinterp.lasso_denoise import DenoiseTrial, NoiseSpec, denoise_trials, scan_lambda
from qmc_hyperinterp.lattice_poly import (
    PolyLattice,
    cbc_poly,
    equidistant_lattice,
    fibonacci_poly_lattice,
    generate_poly_points,
    rbreve_criterion,
    verify_poly_reconstruction,
)
from qmc_hyperinterp.lattice_poly.cbc import poly_was_cached
from qmc_hyperinterp.lattice_rank1 import (
    Rank1Lattice,
    cbc_r,
    cbc_reconstruction,
    cbc_s,
    fibonacci_lattice,
    generate_points,
    lattice_eta,
    r_criterion,
    s_criterion,
    smallest_reconstructing_lattice,
)
from qmc_hyperinterp.lattice_rank1.cbc import was_cached
from qmc_hyperinterp.settings import settings
from qmc_hyperinterp.testbed import get_function
from qmc_hyperinterp.types import BasisKind, PointSet
from qmc_hyperinterp.weights_index import IndexSet, ProductWeights, enumerate_box, enumerate_cross

from .schemas import PRESETS, ConstructReport, ExperimentConfig

HASH_KEY = "input_sha1"
TIMING_COLUMNS = ("t_recon_cbc", "t_s_cbc")

_GNUPLOT_COLUMNS = {
    "points": ("1:2", "points pt 7 ps 0.5", ""),
    "convergence": ("1:4", "linespoints", "set logscale xy\n"),
    "timing": ("2:5", "linespoints", "set logscale xy\n"),
    "denoise": ("1:4", "points", ""),
    "scan-lambda": ("6:4", "points", "set logscale x\n"),
}


def parse_config_document(text: str) -> dict[str, str]:
    """
    `key=value` lines. Blank lines and `#` comments are skipped, except that a
    `# key=value` line (an output header) is read as a value too.

    A document that opens with a comment is an output file: only its leading
    comment block is read and the table or records below it are ignored.
    """
    values: dict[str, str] = {}
    header_only = text.lstrip().startswith("#")
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if header_only and line and not line.startswith("#"):
            break
        if line.startswith("#"):
            line = line[1:].strip()
            if "=" not in line:
                continue
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {number}: expected key=value, got {raw!r}")
        key = key.strip().replace("-", "_")
        if key == HASH_KEY:
            continue
        value = value.strip()
        if value:
            values[key] = value
    return values


def resolve_config(
    command: str,
    flags: dict,
    config_text: str | None = None,
    preset: str | None = None,
) -> ExperimentConfig:
    """Merge preset < config document < flags and validate"""
    document = parse_config_document(config_text) if config_text else {}
    preset = preset or document.get("preset")
    merged: dict = {}
    if preset:
        if preset not in PRESETS:
            known = ", ".join(sorted(PRESETS))
            raise ConfigError(f"unknown preset {preset!r} (known: {known})")
        if PRESETS[preset]["command"] != command:
            raise ConfigError(f"preset {preset!r} belongs to `{PRESETS[preset]['command']}`")
        merged.update(PRESETS[preset])
        merged["preset"] = preset
    merged.update(document)
    merged.update({k: v for k, v in flags.items() if v is not None})
    merged["command"] = command
    return ExperimentConfig.model_validate(merged)


def git_blob_sha1(data: bytes) -> str:
    """Content hash as `git hash-object` computes it"""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def header_lines(cfg: ExperimentConfig) -> list[str]:
    body = "\n".join(f"{k}={v}" for k, v in cfg.resolved_items()) + "\n"
    lines = [f"# {k}={v}" for k, v in cfg.resolved_items()]
    lines.append(f"# {HASH_KEY}={git_blob_sha1(body.encode())}")
    return lines


def gnuplot_stub(cfg: ExperimentConfig, csv_path: Path) -> str:
    using, style, extra = _GNUPLOT_COLUMNS[cfg.command]
    return (
        "set datafile separator ','\n"
        "set datafile commentschars '#'\n"
        f"{extra}"
        f"plot '{csv_path.name}' every ::1 using {using} with {style} title '{cfg.command}'\n"
    )


def write_table(df: pd.DataFrame, cfg: ExperimentConfig) -> str:
    """CSV text under the config header; also written to cfg.output with a gnuplot stub"""
    text = "\n".join(header_lines(cfg)) + "\n" + df.to_csv(index=False, lineterminator="\n")
    if cfg.output is not None:
        path = Path(cfg.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        path.with_suffix(".gp").write_text(gnuplot_stub(cfg, path))
        logger.info(f"wrote {len(df)} rows to {path}")
    return text


def weights_of(cfg: ExperimentConfig) -> ProductWeights:
    return ProductWeights.from_spec(cfg.alpha, cfg.gamma)


def index_set_for(
    cfg: ExperimentConfig, n_points: float, w: ProductWeights, basis_kind: BasisKind
) -> IndexSet:
    """walsh_size, box, threshold or tau, first match wins"""
    if cfg.walsh_size is not None:
        if basis_kind != "walsh":
            raise ConfigError("walsh_size selects a walsh index set")
        return enumerate_box(cfg.d, cfg.walsh_size - 1, "walsh")
    if cfg.box is not None:
        return enumerate_box(cfg.d, cfg.box, basis_kind)
    if cfg.threshold is not None:
        return enumerate_cross(cfg.d, cfg.threshold, w, basis_kind, cfg.b)
    if cfg.tau is not None:
        return enumerate_cross(cfg.d, float(n_points) ** cfg.tau, w, basis_kind, cfg.b)
    raise ConfigError("an index set needs one of walsh_size, box, threshold or tau")


def _require_n(cfg: ExperimentConfig) -> int:
    if cfg.n is None:
        raise ConfigError(f"`{cfg.command}` needs n")
    return cfg.n


def _output_store(cfg: ExperimentConfig) -> VectorRecordStore | None:
    if cfg.output is None:
        return None
    path = Path(cfg.output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(header_lines(cfg)) + "\n")
    return VectorRecordStore(path)


def run_construct(cfg: ExperimentConfig) -> ConstructReport:
    """Run one CBC search, record it in the vector cache and in cfg.output"""
    w = weights_of(cfg)
    store = VectorRecordStore(settings.cache.vector_path)
    if cfg.kind == "poly":
        cached = poly_was_cached(cfg.m, cfg.d, w, cfg.b)
        PL = cbc_poly(cfg.m, cfg.d, w, cfg.b, use_cache=True)
        criterion = rbreve_criterion(PL, w)
        out = _output_store(cfg)
        if out is not None:
            out.store_poly(
                PL.b, PL.m, PL.p.coeffs, w.alpha, w.gamma_spec, tuple(q.coeffs for q in PL.q)
            )
        return ConstructReport(
            kind="poly",
            n_points=PL.n_points,
            d=cfg.d,
            vector=tuple(q.to_int() for q in PL.q),
            criterion=criterion.value,
            cached=cached,
        )

    n = _require_n(cfg)
    if cfg.kind in ("R", "S"):
        cached = was_cached(cfg.kind, n, cfg.d, w)
        search = cbc_r if cfg.kind == "R" else cbc_s
        L = search(n, cfg.d, w, use_cache=True)
        value = (r_criterion if cfg.kind == "R" else s_criterion)(L, w).value
        out = _output_store(cfg)
        if out is not None:
            out.store_rank1(cfg.kind, n, w.alpha, w.gamma_spec, L.z)
        return ConstructReport(
            kind=cfg.kind, n_points=n, d=cfg.d, vector=L.z, criterion=value, cached=cached
        )

    I = index_set_for(cfg, n, w, "trig")
    key = I.provenance.label()
    if I.size > n:
        raise ImpossibilityError(f"|I| = {I.size} exceeds N = {n}: no lattice can reconstruct")
    z = store.lookup_rank1("recon", n, cfg.d, w.alpha, key)
    cached = z is not None
    if z is None:
        L = cbc_reconstruction(n, cfg.d, I)
        z = L.z if L is not None else None
        if z is not None:
            store.store_rank1("recon", n, w.alpha, key, z)
    else:
        logger.info(f"reconstruction N={n} d={cfg.d}: cached")
    out = _output_store(cfg)
    if out is not None and z is not None:
        out.store_rank1("recon", n, w.alpha, key, z)
    eta = lattice_eta(Rank1Lattice(N=n, z=z), I).eta if z is not None else None
    return ConstructReport(
        kind="recon",
        n_points=n,
        d=cfg.d,
        vector=z or (),
        criterion=eta,
        cached=cached,
        index_size=I.size,
        success=z is not None,
    )


def _fibonacci_index(N: int) -> int:
    a, b, k = 1, 1, 2
    while b < N:
        a, b, k = b, a + b, k + 1
    if b != N:
        raise ConfigError(f"{N} is not a Fibonacci number")
    return k


def lattice_points(cfg: ExperimentConfig) -> PointSet:
    if cfg.lattice == "poly":
        if cfg.fibonacci:
            if cfg.d != 2:
                raise ConfigError("Fibonacci polynomial lattices are two-dimensional")
            return generate_poly_points(fibonacci_poly_lattice(cfg.m, cfg.b))
        PL = cbc_poly(cfg.m, cfg.d, weights_of(cfg), cfg.b, use_cache=True)
        return generate_poly_points(PL)
    n = _require_n(cfg)
    if cfg.fibonacci:
        if cfg.d != 2:
            raise ConfigError("Fibonacci lattices are two-dimensional")
        return generate_points(fibonacci_lattice(_fibonacci_index(n)))
    return generate_points(cbc_r(n, cfg.d, weights_of(cfg), use_cache=True))


def run_points(cfg: ExperimentConfig) -> pd.DataFrame:
    """x1..xd per point, as shortest round-trip decimals or exact k/N"""
    points = lattice_points(cfg)
    N = points.denominator
    if cfg.fractions:
        cell = lambda k: f"{k}/{N}"  # noqa: E731
    else:
        cell = lambda k: repr(k / N)  # noqa: E731
    columns = {
        f"x{j + 1}": [cell(int(k)) for k in points.numerators[:, j]] for j in range(points.dim)
    }
    return pd.DataFrame(columns)


def run_convergence(cfg: ExperimentConfig) -> pd.DataFrame:
    """One row per N of the ladder: |I|, eta, L2 error of the lattice approximant"""
    fn = get_function(cfg.function)
    if fn.basis_kind != "trig":
        raise ConfigError(f"the convergence study runs on trig functions, not {fn.name}")
    w = weights_of(cfg)
    rows = []
    for N in cfg.ladder:
        L = cbc_r(N, cfg.d, w, use_cache=True)
        I = index_set_for(cfg, N, w, "trig")
        eta = lattice_eta(L, I).eta
        if eta >= 1:
            logger.warning(f"N={N}: eta={eta:g} >= 1, row skipped")
            rows.append(
                {"N": N, "index_size": I.size, "eta": eta, "l2_error": math.nan, "flagged": True}
            )
            continue
        S = fn.sample(generate_points(L))
        A = qmc_hyperinterp(S, I, method="fft", lattice=L)
        error = l2_error_analytic(A, fn.coefficients(I), fn.norm_squared(cfg.d))
        logger.info(f"N={N} |I|={I.size} eta={eta:g} l2_error={error:.6e}")
        rows.append(
            {"N": N, "index_size": I.size, "eta": eta, "l2_error": error, "flagged": False}
        )
    return pd.DataFrame(rows, columns=["N", "index_size", "eta", "l2_error", "flagged"])


def convergence_slope(df: pd.DataFrame) -> float:
    """Least-squares slope of log(l2_error) against log(N) over retained rows"""
    kept = df[~df["flagged"]]
    if len(kept) < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(kept["N"].astype(float)), np.log(kept["l2_error"]), 1)
    return float(slope)


def _median_time(fn, repetitions: int):
    times, result = [], None
    for _ in range(repetitions):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return float(np.median(times)), result


def run_timing(cfg: ExperimentConfig) -> pd.DataFrame:
    """
    For every M: the reconstruction search (which fixes N), then CBC-S at the
    first prime >= N. Median wall time over cfg.repetitions runs each.
    """
    w = weights_of(cfg)
    rows = []
    for M in cfg.m_ladder:
        threshold = M**cfg.tau if cfg.tau is not None else M
        I = enumerate_cross(cfg.d, threshold, w)
        t_recon, L = _median_time(partial(smallest_reconstructing_lattice, I), cfg.repetitions)
        prime = int(nextprime(L.N - 1))
        t_s, _ = _median_time(
            partial(cbc_s, prime, cfg.d, w, use_cache=False), cfg.repetitions
        )
        logger.info(
            f"M={M:g} |I|={I.size} N={L.N} prime={prime} "
            f"recon={t_recon:.4f}s S={t_s:.4f}s"
        )
        rows.append(
            {
                "M": M,
                "index_size": I.size,
                "N": L.N,
                "prime": prime,
                "t_recon_cbc": t_recon,
                "t_s_cbc": t_s,
            }
        )
    return pd.DataFrame(rows)


class DenoiseProblem:
    """Clean samples, index set and exact coefficients shared by denoise runs"""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        fn = get_function(cfg.function)
        if fn.basis_kind != cfg.basis:
            raise ConfigError(f"{fn.name} lives in the {fn.basis_kind} basis, not {cfg.basis}")
        w = weights_of(cfg)
        if cfg.basis == "walsh":
            PL = self._walsh_lattice(cfg, w)
            self.index_set = index_set_for(cfg, PL.n_points, w, "walsh")
            if not verify_poly_reconstruction(PL, self.index_set.members):
                raise ImpossibilityError(
                    f"the polynomial lattice does not reconstruct |I| = {self.index_set.size}"
                )
            points = generate_poly_points(PL)
        else:
            n = _require_n(cfg)
            self.index_set = index_set_for(cfg, n, w, "trig")
            L = cbc_reconstruction(n, cfg.d, self.index_set)
            if L is None:
                raise ImpossibilityError(
                    f"no reconstructing vector for |I| = {self.index_set.size} at N = {n}"
                )
            points = generate_points(L)
        self.clean: SampleSet = fn.sample(points)
        self.fhat = fn.coefficients(self.index_set)
        self.norm_sq = fn.norm_squared(cfg.d)
        self.noise = NoiseSpec(snr_db=cfg.snr_db, seed=cfg.seed)

    @staticmethod
    def _walsh_lattice(cfg: ExperimentConfig, w: ProductWeights) -> PolyLattice:
        if cfg.d == 1:
            return equidistant_lattice(cfg.m, cfg.b)
        return cbc_poly(cfg.m, cfg.d, w, cfg.b, use_cache=True)


def trials_frame(rows: list[DenoiseTrial]) -> pd.DataFrame:
    df = pd.DataFrame([r.model_dump() for r in rows])
    return df.rename(columns={"lam": "lambda"})[
        ["trial", "seed", "l2_noisy", "l2_lasso", "bound", "lambda", "sigma", "nonzero"]
    ]


def run_denoise(cfg: ExperimentConfig) -> pd.DataFrame:
    """Per-trial plain and Lasso L2 errors at the configured SNR"""
    problem = DenoiseProblem(cfg)
    rows = denoise_trials(
        problem.clean,
        problem.index_set,
        problem.noise,
        cfg.lam,
        cfg.trials,
        problem.fhat,
        problem.norm_sq,
        b=cfg.b,
    )
    return trials_frame(rows)


def run_scan_lambda(cfg: ExperimentConfig) -> pd.DataFrame:
    problem = DenoiseProblem(cfg)
    rows = scan_lambda(
        problem.clean,
        problem.index_set,
        problem.noise,
        cfg.lambdas,
        problem.fhat,
        problem.norm_sq,
        trials=cfg.trials,
        b=cfg.b,
    )
    return trials_frame(rows)


def denoise_summary(df: pd.DataFrame) -> pd.DataFrame:
    """Means per lambda and the share of trials where the Lasso error is smaller"""
    grouped = df.groupby("lambda", sort=True)
    wins = (df["l2_lasso"] < df["l2_noisy"]).groupby(df["lambda"], sort=True).mean()
    return pd.DataFrame(
        {
            "trials": grouped.size(),
            "mean_l2_noisy": grouped["l2_noisy"].mean(),
            "mean_l2_lasso": grouped["l2_lasso"].mean(),
            "bound": grouped["bound"].first(),
            "lasso_wins": wins,
        }
    ).reset_index()
