from .base import (
    KV_SCALE,
    SQUARE_WAVE_PATTERN,
    export_coefficients,
    f_weighted,
    f_weighted_coefficients,
    f_weighted_norm_sq,
    f_weighted_values,
    function_registry,
    get_function,
    import_coefficients,
    kv_coefficients,
    kv_factor,
    kv_fourier,
    kv_values,
    list_functions,
    power_omega,
    register_function,
    square_wave,
    square_wave_coefficients,
    square_wave_values,
)
from .schemas import TestFunction

__all__ = [
    "KV_SCALE",
    "SQUARE_WAVE_PATTERN",
    "TestFunction",
    "export_coefficients",
    "f_weighted",
    "f_weighted_coefficients",
    "f_weighted_norm_sq",
    "f_weighted_values",
    "function_registry",
    "get_function",
    "import_coefficients",
    "kv_coefficients",
    "kv_factor",
    "kv_fourier",
    "kv_values",
    "list_functions",
    "power_omega",
    "register_function",
    "square_wave",
    "square_wave_coefficients",
    "square_wave_values",
]
