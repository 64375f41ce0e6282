"""
Euclidean projection onto box-and-equality sets, and the water-filling
maximizer of a square-root affinity over an interval-constrained simplex.
"""
from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np


def _project_group(v: np.ndarray, w: np.ndarray, lo: np.ndarray, hi: np.ndarray, rhs: float) -> np.ndarray:
    # x_i(tau) = clip(v_i - tau w_i, lo_i, hi_i); sum w x is piecewise linear, non-increasing in tau
    breaks = np.sort(np.concatenate([(v - hi) / w, (v - lo) / w]))
    totals = np.array([w @ np.clip(v - t * w, lo, hi) for t in breaks])
    # totals is non-increasing; find the bracket containing rhs
    above = totals >= rhs
    if not above[0]:
        return np.clip(v - breaks[0] * w, lo, hi)
    if above[-1]:
        return np.clip(v - breaks[-1] * w, lo, hi)
    j = int(np.argmin(above))
    t0, t1 = breaks[j - 1], breaks[j]
    f0, f1 = totals[j - 1], totals[j]
    tau = t1 if f0 == f1 else t0 + (f0 - rhs) * (t1 - t0) / (f0 - f1)
    return np.clip(v - tau * w, lo, hi)


def project_box_equality(
    v: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    groups: Sequence[Tuple[np.ndarray, np.ndarray, float]],
) -> np.ndarray:
    """
    Project v onto {lower <= x <= upper} intersected with disjoint equalities.

    Each group is (indices, positive weights, rhs). Coordinates outside every
    group are simply clipped.
    """
    x = np.clip(np.asarray(v, dtype=float), lower, upper)
    for idx, w, rhs in groups:
        x[idx] = _project_group(np.asarray(v, dtype=float)[idx], w, lower[idx], upper[idx], rhs)
    return x


def max_sqrt_affinity(
    a: np.ndarray,
    p_lo: np.ndarray,
    p_hi: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Maximize sum_i sqrt(a_i p_i) over p_lo <= p <= p_hi, sum p = 1.

    Vectorized over leading axes of ``a``; p_lo/p_hi broadcast against it.
    The maximizer is p_i = clip(a_i tau, lo_i, hi_i) for the tau meeting the
    mass constraint. Mass that entries with a_i > 0 cannot hold goes to the
    a_i = 0 entries, which does not change the value.

    Returns:
        (values, p) with shapes a.shape[:-1] and a.shape.
    """
    a = np.maximum(np.asarray(a, dtype=float), 0.0)
    lo = np.broadcast_to(np.asarray(p_lo, dtype=float), a.shape)
    hi = np.broadcast_to(np.asarray(p_hi, dtype=float), a.shape)
    positive = a > 0
    safe_a = np.where(positive, a, 1.0)

    breaks = np.concatenate(
        [np.where(positive, lo / safe_a, 0.0), np.where(positive, hi / safe_a, 0.0)], axis=-1
    )
    breaks = np.sort(breaks, axis=-1)
    # totals[..., j] = sum_i clip(a_i * breaks_j, lo_i, hi_i)
    filled = np.clip(a[..., None, :] * breaks[..., :, None], lo[..., None, :], hi[..., None, :])
    totals = filled.sum(axis=-1)

    reached = totals >= 1.0
    any_reached = reached.any(axis=-1)
    j = np.argmax(reached, axis=-1)
    j_prev = np.maximum(j - 1, 0)
    t1 = np.take_along_axis(breaks, j[..., None], axis=-1)[..., 0]
    f1 = np.take_along_axis(totals, j[..., None], axis=-1)[..., 0]
    t0 = np.where(j > 0, np.take_along_axis(breaks, j_prev[..., None], axis=-1)[..., 0], 0.0)
    f0 = np.where(j > 0, np.take_along_axis(totals, j_prev[..., None], axis=-1)[..., 0], lo.sum(axis=-1))
    span = f1 - f0
    tau = np.where(span > 0, t0 + (1.0 - f0) * (t1 - t0) / np.where(span > 0, span, 1.0), t1)
    tau = np.where(any_reached, tau, breaks[..., -1])

    p = np.clip(a * tau[..., None], lo, hi)
    # leftover mass goes to zero-weight entries in index order
    leftover = np.maximum(1.0 - p.sum(axis=-1), 0.0)
    if np.any(leftover > 0):
        p = p.copy()
        for i in range(a.shape[-1]):
            room = np.where(positive[..., i], 0.0, hi[..., i] - p[..., i])
            add = np.minimum(room, leftover)
            p[..., i] += add
            leftover = leftover - add
    values = np.sqrt(a * p).sum(axis=-1)
    return values, p
