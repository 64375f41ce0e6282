from .gramian import DENOMINATOR_GUARD, gamma_bar_sq, gramian_upper_bound
from .intervals import (
    CellIntervals,
    Interval,
    IntervalTable,
    interval_table,
    mean_interval,
    proportion_interval,
    shift_constant,
    shift_constant_range,
    std_interval,
    union_confidence,
)

__all__ = [
    "DENOMINATOR_GUARD",
    "CellIntervals",
    "Interval",
    "IntervalTable",
    "gamma_bar_sq",
    "gramian_upper_bound",
    "interval_table",
    "mean_interval",
    "proportion_interval",
    "shift_constant",
    "shift_constant_range",
    "std_interval",
    "union_confidence",
]
