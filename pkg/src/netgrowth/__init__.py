"""Simulation and analysis of growing networks with densifying degree.

Generators emit timestamped event logs; the analysis side replays a log
into snapshots at ``n = 2**i``, fits the degree exponent of each snapshot
and the growth law ``a + c * n**b`` of the average degree.
"""
__version__ = "0.1.0"

from .curvefit import AvgDegreeCurve, CurvePoint, evaluate_curve, fit_avg_degree_curve, rmse
from .events import EdgeEvent, EventLog, EventParseError, parse_events, read_events
from .graph import DynamicGraph, EmptyGraphError, Snapshot
from .powerlaw import (
    BinnedDistribution,
    ExponentFitReport,
    FitError,
    TailEstimate,
    avg_degree_from_alpha,
    delta_from_avg_degree,
    fit_exponent,
    ks_statistic,
    log_binned_distribution,
    mle_alpha,
)
from .stream import (
    EventTypeCounts,
    TrajectorySeries,
    classify_event,
    nz_series,
    replay,
    shuffle_events,
)

__all__ = [
    "AvgDegreeCurve",
    "BinnedDistribution",
    "CurvePoint",
    "DynamicGraph",
    "EdgeEvent",
    "EmptyGraphError",
    "EventLog",
    "EventParseError",
    "EventTypeCounts",
    "ExponentFitReport",
    "FitError",
    "Snapshot",
    "TailEstimate",
    "TrajectorySeries",
    "avg_degree_from_alpha",
    "classify_event",
    "delta_from_avg_degree",
    "evaluate_curve",
    "fit_avg_degree_curve",
    "fit_exponent",
    "ks_statistic",
    "log_binned_distribution",
    "mle_alpha",
    "nz_series",
    "parse_events",
    "read_events",
    "replay",
    "rmse",
    "shuffle_events",
]
