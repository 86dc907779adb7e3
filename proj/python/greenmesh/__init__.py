"""Greenhouse climate sensor-network simulator and heterogeneity analyser."""

import json as _json

from ._core import (
    ConfigError,
    DomainError,
    FormatError,
    NotReadyError,
    RoutingError,
    StorageError,
    assess,
    bundled_scenarios,
    classify_uvi,
    export_csv,
    hcg_forced,
    hcg_natural,
    homogeneity_limit,
    mean_radiant_forced,
    mean_radiant_natural,
    mean_radiant_temp,
    partial_vapour_pressure,
    routing_tree,
    uvi_from_spectrum,
    validate_scenario,
    verify,
    weighted_vertical_mean,
)
from ._core import analyze as _analyze
from ._core import simulate as _simulate

__version__ = "1.0.0"


def simulate(scenario, out, seed=None):
    """Run a bundled scenario name or scenario file into `out`; returns the summary dict."""
    return _json.loads(_simulate(scenario, str(out), seed))


def analyze(store, params=("air_temp", "mean_radiant_temp"), out=None, debounce=None):
    """Analyse every closed day of a store; returns the report dict."""
    return _json.loads(_analyze(str(store), list(params), None if out is None else str(out), debounce))


__all__ = [name for name in dir() if not name.startswith("_")]
