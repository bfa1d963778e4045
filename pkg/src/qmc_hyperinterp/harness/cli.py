"""CLI entry point for the QMC hyperinterpolation experiments."""

import sys
from contextlib import contextmanager
from pathlib import Path

import click
import pandas as pd
from loguru import logger
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from qmc_hyperinterp.exceptions import (
    ConfigError,
    ImpossibilityError,
    QMCHyperinterpError,
    ResourceCapError,
)
from qmc_hyperinterp.settings import settings

from .base import (
    convergence_slope,
    denoise_summary,
    resolve_config,
    run_construct,
    run_convergence,
    run_denoise,
    run_points,
    run_scan_lambda,
    run_timing,
    write_table,
)
from .schemas import PRESETS, ConstructReport, ExperimentConfig

console = Console(stderr=True)


class ConfigFailure(click.ClickException):
    exit_code = 2


class ImpossibleRequest(click.ClickException):
    exit_code = 3


class ResourceCapExceeded(click.ClickException):
    exit_code = 4


@contextmanager
def exit_codes():
    """Map library exceptions to the documented exit codes"""
    try:
        yield
    except (ConfigError, ValidationError) as e:
        raise ConfigFailure(str(e)) from e
    except ImpossibilityError as e:
        raise ImpossibleRequest(str(e)) from e
    except ResourceCapError as e:
        raise ResourceCapExceeded(str(e)) from e
    except QMCHyperinterpError as e:
        raise click.ClickException(str(e)) from e


def configure_logging(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else settings.logging.level)


def common_options(f):
    options = [
        click.option(
            "--config",
            "config_file",
            type=click.Path(exists=True, dir_okay=False, path_type=Path),
            default=None,
            help="key=value document; flags override its values",
        ),
        click.option(
            "--preset",
            type=click.Choice(sorted(PRESETS)),
            default=None,
            help="Named experiment configuration",
        ),
        click.option(
            "--output",
            type=click.Path(dir_okay=False, path_type=Path),
            default=None,
            help="Write the result here instead of stdout",
        ),
        click.option("--verbose", "-v", is_flag=True, default=False, help="Debug logging"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def weight_options(f):
    options = [
        click.option("--d", type=int, default=None, help="Dimension"),
        click.option("--alpha", type=float, default=None, help="Smoothness alpha"),
        click.option("--gamma", default=None, help="Weights: const:c, pow:c:a or list:g1,..."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def index_options(f):
    options = [
        click.option("--threshold", type=float, default=None, help="Hyperbolic cross threshold M"),
        click.option("--tau", type=float, default=None, help="Hyperbolic threshold N^tau"),
        click.option("--box", type=int, default=None, help="Box index set max|h_j| <= box"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def noise_options(f):
    options = [
        click.option("--function", default=None, help="Registered test function"),
        click.option("--basis", type=click.Choice(["trig", "walsh"]), default=None),
        click.option("--n", type=int, default=None, help="Rank-1 lattice size"),
        click.option("--m", type=int, default=None, help="Polynomial lattice b^m"),
        click.option("--b", type=int, default=None, help="Walsh base"),
        click.option("--walsh-size", type=int, default=None, help="Walsh index set {0..size-1}"),
        click.option("--snr-db", type=float, default=None, help="Signal-to-noise ratio in dB"),
        click.option("--seed", type=int, default=None, help="Seed of the first trial"),
        click.option("--trials", type=int, default=None, help="Number of seeded trials"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _resolve(command: str, config_file, preset, output, flags: dict) -> ExperimentConfig:
    text = config_file.read_text() if config_file is not None else None
    flags = dict(flags, output=output)
    return resolve_config(command, flags, config_text=text, preset=preset)


def _emit(df: pd.DataFrame, cfg: ExperimentConfig) -> None:
    text = write_table(df, cfg)
    if cfg.output is None:
        click.echo(text, nl=False)


def _frame_table(df: pd.DataFrame, title: str) -> Table:
    table = Table(title=title)
    for column in df.columns:
        table.add_column(str(column))
    for row in df.itertuples(index=False):
        table.add_row(*(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    return table


def _report_construct(report: ConstructReport) -> None:
    status = "cached" if report.cached else "computed"
    table = Table(title=f"construct {report.kind} ({status})")
    table.add_column("field")
    table.add_column("value")
    table.add_row("points", str(report.n_points))
    table.add_row("d", str(report.d))
    table.add_row("vector", " ".join(str(v) for v in report.vector) or "-")
    if report.kind == "recon":
        table.add_row("|I|", str(report.index_size))
        table.add_row("success", str(report.success))
        table.add_row("eta", "-" if report.criterion is None else f"{report.criterion:g}")
    else:
        table.add_row("criterion", f"{report.criterion:.10e}")
    console.print(table)
    console.print(status)


@click.group()
def main():
    """QMC hyperinterpolation: lattice constructions and experiments."""


@main.command()
@common_options
@weight_options
@index_options
@click.option("--kind", type=click.Choice(["R", "S", "recon", "poly"]), default=None)
@click.option("--n", type=int, default=None, help="Prime lattice size (R, S) or N (recon)")
@click.option("--m", type=int, default=None, help="Polynomial lattice b^m")
@click.option("--b", type=int, default=None, help="Polynomial base")
def construct(config_file, preset, output, verbose, **flags):
    """Run a CBC search and record its generating vector."""
    configure_logging(verbose)
    with exit_codes():
        cfg = _resolve("construct", config_file, preset, output, flags)
        report = run_construct(cfg)
    _report_construct(report)
    if cfg.output is None:
        click.echo(" ".join(str(v) for v in report.vector))


@main.command()
@common_options
@weight_options
@click.option("--lattice", type=click.Choice(["rank1", "poly"]), default=None)
@click.option("--fibonacci/--cbc", default=None, help="Fibonacci lattice or a CBC one")
@click.option("--n", type=int, default=None, help="Rank-1 lattice size")
@click.option("--m", type=int, default=None, help="Polynomial lattice b^m")
@click.option("--b", type=int, default=None, help="Polynomial base")
@click.option("--fractions/--decimal", default=None, help="Print k/N instead of decimals")
def points(config_file, preset, output, verbose, **flags):
    """Write a lattice point set as CSV."""
    configure_logging(verbose)
    with exit_codes():
        cfg = _resolve("points", config_file, preset, output, flags)
        df = run_points(cfg)
    _emit(df, cfg)


@main.command()
@common_options
@weight_options
@index_options
@click.option("--function", default=None, help="kv or kv-weighted")
@click.option("--ladder", default=None, help="Comma-separated primes")
def convergence(config_file, preset, output, verbose, **flags):
    """L2 error of the lattice approximant along a ladder of N."""
    configure_logging(verbose)
    with exit_codes():
        cfg = _resolve("convergence", config_file, preset, output, flags)
        df = run_convergence(cfg)
    _emit(df, cfg)
    console.print(_frame_table(df, f"convergence of {cfg.function}"))
    console.print(f"log-log slope: {convergence_slope(df):.4f}")


@main.command()
@common_options
@weight_options
@click.option("--tau", type=float, default=None, help="Index set threshold M^tau")
@click.option("--m-ladder", default=None, help="Comma-separated thresholds M")
@click.option("--repetitions", type=int, default=None, help="Runs per median, at least 3")
def timing(config_file, preset, output, verbose, **flags):
    """Wall time of the reconstruction search against CBC-S."""
    configure_logging(verbose)
    with exit_codes():
        cfg = _resolve("timing", config_file, preset, output, flags)
        df = run_timing(cfg)
    _emit(df, cfg)
    console.print(_frame_table(df, "timing (median seconds)"))


@main.command()
@common_options
@weight_options
@index_options
@noise_options
@click.option("--lam", type=float, default=None, help="Lasso lambda")
def denoise(config_file, preset, output, verbose, **flags):
    """Plain and Lasso approximation of noisy samples."""
    configure_logging(verbose)
    with exit_codes():
        cfg = _resolve("denoise", config_file, preset, output, flags)
        df = run_denoise(cfg)
    _emit(df, cfg)
    console.print(_frame_table(denoise_summary(df), f"denoising {cfg.function}"))


@main.command("scan-lambda")
@common_options
@weight_options
@index_options
@noise_options
@click.option("--lambdas", default=None, help="Comma-separated lambda grid")
def scan_lambda_command(config_file, preset, output, verbose, **flags):
    """Lasso error over a grid of lambda."""
    configure_logging(verbose)
    with exit_codes():
        cfg = _resolve("scan-lambda", config_file, preset, output, flags)
        df = run_scan_lambda(cfg)
    _emit(df, cfg)
    console.print(_frame_table(denoise_summary(df), f"lambda scan for {cfg.function}"))
