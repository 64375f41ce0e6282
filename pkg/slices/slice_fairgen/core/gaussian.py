"""
Gaussian-mixture demo data and a fixed logistic scorer.

The scorer lets the demo compute losses on the disjointly shifted copy
of every sample, which the general-shifting protocol needs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ...exceptions import InvalidInputError
from ...slice_stats.core import LossKind, SampleBatch, compute_losses
from .types import DISJOINT_OFFSET, GaussianDataset, GaussianMixtureSpec


def gen_gaussian_mixture(spec: Optional[GaussianMixtureSpec], n: int, seed: int) -> GaussianDataset:
    """Draw n labeled points; the label is the mixture component."""
    if n < 1:
        raise InvalidInputError(f"n must be at least 1, got {n}")
    spec = spec or GaussianMixtureSpec()
    rng = np.random.default_rng(seed)
    y = rng.choice(2, size=n, p=np.asarray(spec.weights, dtype=float))
    means = np.asarray(spec.means, dtype=float)[y]
    scales = np.asarray(spec.scales, dtype=float)[y][:, None]
    features = means + scales * rng.standard_normal((n, 2))
    s = (features[:, 1] > 0).astype(np.int64)
    return GaussianDataset(features=features, s=s, y=y.astype(np.int64))


def disjoint_transform(features: np.ndarray, offset: float = DISJOINT_OFFSET, columns: Sequence[int] = (0,)) -> np.ndarray:
    """Shift non-sensitive columns so the copy's support misses the original's."""
    shifted = np.array(features, dtype=float, copy=True)
    shifted[:, list(columns)] += offset
    return shifted


@dataclass
class LinearScorer:
    """Pr[y = 1 | x] = logistic(w . x + b)."""
    w: Sequence[float] = (2.0, 0.5)
    b: float = 0.0

    def predict(self, features: np.ndarray) -> np.ndarray:
        z = np.asarray(features, dtype=float) @ np.asarray(self.w, dtype=float) + self.b
        p1 = 0.5 * (1.0 + np.tanh(0.5 * z))
        return np.stack([1.0 - p1, p1], axis=1)

    def losses(self, features: np.ndarray, labels: np.ndarray, kind: LossKind) -> np.ndarray:
        return compute_losses(self.predict(features), labels, kind)


def demo_batch(
    dataset: GaussianDataset,
    scorer: Optional[LinearScorer] = None,
    kind: LossKind = LossKind.ZERO_ONE,
    offset: float = DISJOINT_OFFSET,
) -> SampleBatch:
    """Samples with per-sample losses on the originals and the shifted copies."""
    scorer = scorer or LinearScorer()
    kind = LossKind(kind)
    return SampleBatch(
        s=dataset.s,
        y=dataset.y,
        loss=scorer.losses(dataset.features, dataset.y, kind),
        shifted_loss=scorer.losses(disjoint_transform(dataset.features, offset), dataset.y, kind),
    )
