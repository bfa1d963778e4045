from .base import (
    convergence_slope,
    denoise_summary,
    git_blob_sha1,
    parse_config_document,
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

__all__ = [
    "PRESETS",
    "ConstructReport",
    "ExperimentConfig",
    "convergence_slope",
    "denoise_summary",
    "git_blob_sha1",
    "parse_config_document",
    "resolve_config",
    "run_construct",
    "run_convergence",
    "run_denoise",
    "run_points",
    "run_scan_lambda",
    "run_timing",
    "write_table",
]
