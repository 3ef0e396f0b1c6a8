"""Prime-digit lattice walks: sieve, walk engine and statistics."""

from .benford import benford_expected, benford_table, leading_digit
from .fitting import FitResult, fit_area_growth, linear_fit
from .grid import AreaSeries, GridObserver, VisitMap, recurrence_report
from .polar import (
    PolarObserver,
    box_counting_dimension,
    delta_phi_histogram,
    delta_series,
    to_polar,
)
from .primes import (
    PrimeDigitEvent,
    base_primes,
    count_walk_primes,
    iter_events,
    sieve_segment,
    stream_events,
)
from .runs import RunHistogram, run_histogram, short_run_fraction
from .walk import (
    RULES,
    A1,
    A2,
    A3,
    Direction,
    RandomSource,
    WalkRule,
    WalkState,
    pearson_direction,
    rule_direction,
    run_random_walk,
    run_walk,
    step,
)

__all__ = [
    "A1",
    "A2",
    "A3",
    "AreaSeries",
    "Direction",
    "FitResult",
    "GridObserver",
    "PolarObserver",
    "PrimeDigitEvent",
    "RULES",
    "RandomSource",
    "RunHistogram",
    "VisitMap",
    "WalkRule",
    "WalkState",
    "base_primes",
    "benford_expected",
    "benford_table",
    "box_counting_dimension",
    "count_walk_primes",
    "delta_phi_histogram",
    "delta_series",
    "fit_area_growth",
    "iter_events",
    "leading_digit",
    "linear_fit",
    "pearson_direction",
    "recurrence_report",
    "rule_direction",
    "run_histogram",
    "run_random_walk",
    "run_walk",
    "short_run_fraction",
    "sieve_segment",
    "step",
    "stream_events",
    "to_polar",
]

__version__ = "0.1.0"
