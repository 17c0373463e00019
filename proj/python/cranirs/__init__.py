"""Joint IRS phase and fronthaul compression design for C-RAN uplink."""

import json

from ._core import (
    ChannelSet,
    ConfigError,
    DimensionError,
    InfiniteRateError,
    NumericalError,
    SolverError,
    default_config,
    draw_drop,
    effective_channel,
    first_relaxation,
    fronthaul_slacks,
    normalize_config,
    p2p_lhs,
    run,
    sum_rate,
    sweep,
    wz_lhs,
)


def config(**overrides):
    """Reference scenario with keyword overrides, as a JSON string."""
    base = json.loads(default_config())
    base.update(overrides)
    return normalize_config(json.dumps(base))


__all__ = [
    "ChannelSet",
    "ConfigError",
    "DimensionError",
    "InfiniteRateError",
    "NumericalError",
    "SolverError",
    "config",
    "default_config",
    "draw_drop",
    "effective_channel",
    "first_relaxation",
    "fronthaul_slacks",
    "normalize_config",
    "p2p_lhs",
    "run",
    "sum_rate",
    "sweep",
    "wz_lhs",
]
