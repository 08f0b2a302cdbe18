"""Mean-field game solver on the torus with a-priori estimate monitoring."""

import json
import sys

from ._mfglab import (
    ConfigError,
    ConvergenceError,
    Error,
    SnapshotError,
    adjoint_step4_params,
    beta_iteration,
    critical_alpha,
    default_config,
    derive_params,
    feasibility_search,
    normalize_config,
    read_snapshot,
    run_cli,
)
from . import _mfglab


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def solve(config, strict=False):
    """Solve for every epsilon of the schedule; config is a dict or JSON text."""
    return _mfglab.solve(_text(config), strict)


def check_assumptions(config):
    return _mfglab.check_assumptions(_text(config))


def validate_config(config):
    _mfglab.validate_config(_text(config))


def main():
    sys.exit(run_cli(sys.argv[1:]))


__all__ = [
    "ConfigError",
    "ConvergenceError",
    "Error",
    "SnapshotError",
    "adjoint_step4_params",
    "beta_iteration",
    "check_assumptions",
    "critical_alpha",
    "default_config",
    "derive_params",
    "feasibility_search",
    "main",
    "normalize_config",
    "read_snapshot",
    "run_cli",
    "solve",
    "validate_config",
]
