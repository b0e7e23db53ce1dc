"""EnergyPlus output workbench: parse, store, aggregate and summarize runs."""

from ._core import (
    Error,
    Store,
    aggregate_series,
    build_weights,
    describe,
    parse_series_header,
    run_cli,
    synth,
)

__all__ = [
    "Error",
    "Store",
    "aggregate_series",
    "build_weights",
    "describe",
    "error_code",
    "parse_series_header",
    "run_cli",
    "synth",
]


def error_code(exc):
    """Code name of an epdata.Error, e.g. 'RaggedRow'."""
    return exc.args[0] if exc.args else None
