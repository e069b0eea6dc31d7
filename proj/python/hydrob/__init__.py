"""Hydrostatic Oldroyd-B thin-strip solver."""

import json

from ._hydrob import (  # noqa: F401
    ConfigError,
    Grid,
    MaterialParams,
    WeightOverflowError,
    __version__,
    algebraic_oracle,
    anisotropic_norm,
    dealias,
    default_config,
    derivative,
    fit_rate,
    g1,
    g2,
    limit_final_velocity,
    normalize_config,
    relaxation_decay_error,
    stress_closure,
    stress_derived,
)
from ._hydrob import execute as _execute


def execute(config_text, mode, out_dir):
    """Run a mode; returns (exit_code, summary dict, message)."""
    code, summary, message = _execute(config_text, mode, str(out_dir))
    return code, (json.loads(summary) if summary else {}), message
