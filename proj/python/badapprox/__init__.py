"""Exact continued fractions, Ostrowski digits, Kaufman measures and counting experiments."""

from ._badapprox import (
    DepthError,
    GuardError,
    Measure,
    convergents,
    count_V,
    encode_int,
    encode_real,
    enumerate_V,
    exponents,
    identity_suite,
    mult_sequence,
    nag_evaluate,
    oscint_sweep,
    quad_oscillatory,
    run_cli,
    value,
    window_coeff,
)

__version__ = "0.1.0"
