"""Stats core: types, losses, aggregation and fairness gaps."""

from .aggregate import aggregate_stats, as_batch, base_rates, is_fair_base_rate, with_loss_bound
from .gaps import dp_gap, eo_gap
from .io import read_samples_csv, read_stats_json, write_samples_csv, write_stats_json
from .losses import compute_loss, compute_losses, pairwise_variance
from .types import (
    LossKind,
    SampleBatch,
    SampleRecord,
    StatsTable,
    SubpopKey,
    SubpopStats,
)

__all__ = [
    "LossKind",
    "SampleBatch",
    "SampleRecord",
    "StatsTable",
    "SubpopKey",
    "SubpopStats",
    "aggregate_stats",
    "as_batch",
    "base_rates",
    "compute_loss",
    "compute_losses",
    "dp_gap",
    "eo_gap",
    "is_fair_base_rate",
    "pairwise_variance",
    "read_samples_csv",
    "read_stats_json",
    "with_loss_bound",
    "write_samples_csv",
    "write_stats_json",
]
