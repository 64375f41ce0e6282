"""
Demographic-parity and equalized-odds gaps for binary-label classifiers.

"Positive" means label index 1; the hard prediction is the argmax of the
probability vector.
"""
from __future__ import annotations

import numpy as np

from ...exceptions import InvalidInputError
from .aggregate import Samples, as_batch


def _hard_predictions(samples: Samples, S: int, C: int):
    if C != 2:
        raise InvalidInputError(f"DP/EO gaps need binary labels, got C={C}")
    batch = as_batch(samples)
    if batch.predictions is None:
        raise InvalidInputError("gap evaluation needs prediction vectors")
    if batch.predictions.shape[1] != C:
        raise InvalidInputError("prediction width does not match C")
    batch.check_keys(S, C)
    positive = np.argmax(batch.predictions, axis=1) == 1
    return batch, positive


def _max_spread(rates: np.ndarray) -> float:
    return float(rates.max() - rates.min()) if rates.size else 0.0


def dp_gap(samples: Samples, S: int, C: int) -> float:
    """max_{i,j} |Pr[h=1 | X_s=i] - Pr[h=1 | X_s=j]|."""
    batch, positive = _hard_predictions(samples, S, C)
    counts = np.bincount(batch.s, minlength=S)
    empty = np.nonzero(counts == 0)[0]
    if empty.size:
        raise InvalidInputError(f"sensitive group {int(empty[0])} has no samples")
    rates = np.bincount(batch.s, weights=positive, minlength=S) / counts
    return _max_spread(rates)


def eo_gap(samples: Samples, S: int, C: int) -> float:
    """max_{y,i,j} |Pr[h=1 | Y=y, X_s=i] - Pr[h=1 | Y=y, X_s=j]|."""
    batch, positive = _hard_predictions(samples, S, C)
    cell = batch.s * C + batch.y
    counts = np.bincount(cell, minlength=S * C).reshape(S, C)
    empty = np.argwhere(counts == 0)
    if empty.size:
        s, y = (int(v) for v in empty[0])
        raise InvalidInputError(f"cell (s={s}, y={y}) has no samples")
    rates = np.bincount(cell, weights=positive, minlength=S * C).reshape(S, C) / counts
    return max(_max_spread(rates[:, y]) for y in range(C))
