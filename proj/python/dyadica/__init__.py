"""Dyadic harmonic analysis on the discretized torus."""

from ._dyadica import (
    ConfigurationError,
    DyadicaError,
    ParameterError,
    ShapeError,
    __version__,
    ap_characteristic,
    apq_characteristic,
    commutator,
    decompose_product,
    dyadic_maximal,
    exponent_solve,
    frac_integral,
    frac_maximal,
    haar_forward,
    haar_inverse,
    inner_commutator,
    paraproduct,
    partial_frac_integral,
    power_weight,
    square_function,
    strong_maximal,
)
from ._dyadica import run_checks as _run_checks

import json as _json


def run_checks(config):
    """Run a suite. `config` is a dict or JSON text; returns the report dict."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_run_checks(text))


__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
