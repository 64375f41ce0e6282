"""
Per-sample losses and the pairwise variance estimator.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial.distance import jensenshannon

from ...exceptions import InvalidInputError
from .types import MASS_TOLERANCE, LossKind, check_probability_vector

BCE_FLOOR = 1e-12
# Explicit O(n^2) pairwise sums above this size switch to the closed form.
PAIRWISE_EXPLICIT_LIMIT = 2048


def compute_loss(prediction, label: int, kind: LossKind) -> float:
    """Loss of one probability vector against an integer label."""
    vec = np.asarray(prediction, dtype=float)
    check_probability_vector(vec)
    if not 0 <= int(label) < vec.size:
        raise InvalidInputError(f"label {label} out of range for {vec.size} classes")
    return float(compute_losses(vec[None, :], np.array([label]), LossKind(kind))[0])


def compute_losses(predictions: np.ndarray, labels: np.ndarray, kind: LossKind) -> np.ndarray:
    """Vectorized loss over rows of an (n, C) prediction matrix."""
    predictions = np.atleast_2d(np.asarray(predictions, dtype=float))
    labels = np.asarray(labels, dtype=np.int64)
    n, n_classes = predictions.shape
    if labels.shape != (n,):
        raise InvalidInputError("labels must have one entry per prediction row")
    if n == 0:
        return np.zeros(0)
    if np.any((labels < 0) | (labels >= n_classes)):
        raise InvalidInputError("label out of range")
    if (
        not np.all(np.isfinite(predictions))
        or np.any(predictions < 0.0)
        or np.any(predictions > 1.0)
        or np.any(np.abs(predictions.sum(axis=1) - 1.0) > MASS_TOLERANCE)
    ):
        raise InvalidInputError("malformed probability vector")

    kind = LossKind(kind)
    rows = np.arange(n)
    if kind is LossKind.ZERO_ONE:
        # argmax returns the first maximum, i.e. ties go to the smallest index
        return (np.argmax(predictions, axis=1) != labels).astype(float)
    if kind is LossKind.BCE:
        return -np.log(np.maximum(predictions[rows, labels], BCE_FLOOR))

    one_hot = np.zeros_like(predictions)
    one_hot[rows, labels] = 1.0
    distance = jensenshannon(predictions, one_hot, base=2, axis=1)
    return np.clip(np.nan_to_num(distance) ** 2, 0.0, 1.0)


def pairwise_variance(losses: np.ndarray) -> float:
    """
    s_n^2 = 1/(n(n-1)) * sum_{i<j} (l_i - l_j)^2.

    Uses the identity sum_{i<j}(l_i - l_j)^2 = n * sum_i (l_i - mean)^2 for
    large inputs.
    """
    values = np.asarray(losses, dtype=float)
    n = values.size
    if n < 2:
        raise InvalidInputError("variance needs at least two samples")
    if n <= PAIRWISE_EXPLICIT_LIMIT:
        diffs = np.subtract.outer(values, values)
        pair_sum = 0.5 * float(np.sum(diffs * diffs))
    else:
        centered = values - values.mean()
        pair_sum = n * float(np.dot(centered, centered))
    return pair_sum / (n * (n - 1))
