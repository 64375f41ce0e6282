"""
Aggregation of raw samples into subpopulation statistics, and base-rate
utilities over S x C mass matrices.
"""
from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from infrastructure.observability import get_logger

from ...exceptions import EmptyCellError, InvalidInputError
from .losses import compute_losses, pairwise_variance
from .types import LossKind, SampleBatch, SampleRecord, StatsTable, SubpopStats

logger = get_logger(__name__)

Samples = Union[SampleBatch, Sequence[SampleRecord]]

# relative rounding allowed when a mean meets the loss bound
MEAN_SLACK = 1e-12


def as_batch(samples: Samples) -> SampleBatch:
    if isinstance(samples, SampleBatch):
        return samples
    return SampleBatch.from_records(list(samples))


def sample_losses(batch: SampleBatch, kind: LossKind) -> np.ndarray:
    """Per-sample losses, computing them from predictions when needed."""
    if batch.loss is not None:
        if np.any(batch.loss < 0) or not np.all(np.isfinite(batch.loss)):
            raise InvalidInputError("losses must be finite and non-negative")
        return batch.loss
    if batch.predictions is None:
        raise InvalidInputError("samples carry neither losses nor predictions")
    return compute_losses(batch.predictions, batch.y, kind)


def aggregate_stats(samples: Samples, S: int, C: int, kind: LossKind) -> StatsTable:
    """
    Fold samples into an S x C StatsTable.

    Every cell needs at least two samples; the first offending cell in
    row-major order is named in the error.
    """
    kind = LossKind(kind)
    batch = as_batch(samples)
    batch.check_keys(S, C)
    if batch.predictions is not None and batch.predictions.shape[1] != C:
        raise InvalidInputError(
            f"predictions have {batch.predictions.shape[1]} classes, expected C={C}"
        )
    losses = sample_losses(batch, kind)

    cell_index = batch.s * C + batch.y
    counts = np.bincount(cell_index, minlength=S * C)
    for idx, count in enumerate(counts):
        if count < 2:
            raise EmptyCellError((idx // C, idx % C), int(count))

    total = int(counts.sum())
    M = kind.bound
    cells = []
    for idx, count in enumerate(counts):
        cell_losses = losses[cell_index == idx]
        mean = float(cell_losses.mean())
        if M is not None:
            if mean > M * (1.0 + MEAN_SLACK):
                raise InvalidInputError(
                    f"cell (s={idx // C}, y={idx % C}) has mean loss {mean} above the {kind.value} bound M={M}"
                )
            # rounding only
            mean = min(mean, M)
        cells.append(
            SubpopStats(
                s=idx // C,
                y=idx % C,
                n=int(count),
                E=mean,
                V=pairwise_variance(cell_losses),
                p=float(count) / total,
            )
        )
    table = StatsTable(S=S, C=C, M=M, cells=cells)
    logger.info("stats_aggregated", S=S, C=C, total=total, loss=kind.value)
    return table


def with_loss_bound(table: StatsTable, M: float) -> StatsTable:
    """Attach an explicit clip bound M (e.g. for BCE)."""
    if M <= 0:
        raise InvalidInputError(f"loss bound M must be positive, got {M}")
    worst = max(table.cells, key=lambda c: c.E)
    if worst.E > M:
        raise InvalidInputError(
            f"cell (s={worst.s}, y={worst.y}) has mean loss {worst.E} above M={M}"
        )
    return table.model_copy(update={"M": float(M)})


def _mass_matrix(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.ndim != 2:
        raise InvalidInputError("masses must be an S x C matrix")
    if np.any(q < 0) or abs(float(q.sum()) - 1.0) > 1e-9:
        raise InvalidInputError("masses must be non-negative and sum to 1")
    return q


def base_rates(q) -> np.ndarray:
    """Pr[Y=y | X_s=s] for every group s."""
    q = _mass_matrix(q)
    group_mass = q.sum(axis=1, keepdims=True)
    if np.any(group_mass <= 0):
        raise InvalidInputError("a sensitive group has zero mass")
    return q / group_mass


def is_fair_base_rate(q, tol: float = 1e-9) -> bool:
    """True iff q factors as (group marginal) x (label marginal)."""
    q = _mass_matrix(q)
    product = np.outer(q.sum(axis=1), q.sum(axis=0))
    return bool(np.all(np.abs(q - product) <= tol))
