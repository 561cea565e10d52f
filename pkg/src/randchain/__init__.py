"""Exact and simulated statistics of random convex chains in a right triangle."""
from .distribution import (
    nn_moment,
    pgf_closed,
    pgf_recurrence,
    pk_closed,
    pk_composition,
    pk_row,
    pk_table_recurrence,
)
from .exact import BivariateSeries, RationalPoly, esp_c, harmonic
from .moments import Route, moment_closed, moment_recurrence, moment_table
from .simulator import SimSummary, compare_to_exact, convex_chain, estimate

__version__ = "0.1.0"

__all__ = [
    "BivariateSeries",
    "RationalPoly",
    "Route",
    "SimSummary",
    "compare_to_exact",
    "convex_chain",
    "esp_c",
    "estimate",
    "harmonic",
    "moment_closed",
    "moment_recurrence",
    "moment_table",
    "nn_moment",
    "pgf_closed",
    "pgf_recurrence",
    "pk_closed",
    "pk_composition",
    "pk_row",
    "pk_table_recurrence",
]
