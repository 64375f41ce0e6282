"""
Certificate curve against simulated trials.

A trial violates the curve when its loss exceeds the bound at its
distance. Bounds between curve points are linearly interpolated by
default; ``lookup="step"`` uses the bound of the next curve point at or
above the distance, which is the sound reading of a non-decreasing curve.
"""
from __future__ import annotations

from typing import Literal, Optional, Sequence, Tuple, Union

import numpy as np

from infrastructure.observability import get_logger

from ...exceptions import InvalidInputError
from ...slice_general.core import SweepPoint
from .types import BucketGap, ShiftTrial, TrialPoint, ValidationReport

logger = get_logger(__name__)

Trial = Union[ShiftTrial, TrialPoint]
CurvePoint = Union[SweepPoint, Tuple[float, Optional[float]]]
Lookup = Literal["linear", "step"]


def _curve_arrays(curve: Sequence[CurvePoint]) -> Tuple[np.ndarray, np.ndarray]:
    pairs = []
    for point in curve:
        if isinstance(point, SweepPoint):
            if point.feasible:
                pairs.append((point.rho, point.bound))
        elif point[1] is not None:
            pairs.append((float(point[0]), float(point[1])))
    if not pairs:
        raise InvalidInputError("certificate curve has no feasible points")
    rho = np.array([p[0] for p in pairs], dtype=float)
    bound = np.array([p[1] for p in pairs], dtype=float)
    if np.any(np.diff(rho) < 0):
        raise InvalidInputError("certificate curve must be sorted by rho")
    return rho, bound


def curve_bound(rho: np.ndarray, bound: np.ndarray, distance: np.ndarray, lookup: Lookup = "linear") -> np.ndarray:
    """Bound at each distance; NaN outside [rho[0], rho[-1]]."""
    distance = np.asarray(distance, dtype=float)
    if lookup == "linear":
        values = np.interp(distance, rho, bound)
    elif lookup == "step":
        idx = np.minimum(np.searchsorted(rho, distance, side="left"), rho.size - 1)
        values = bound[idx]
    else:
        raise InvalidInputError(f"unknown lookup {lookup!r}")
    outside = (distance < rho[0]) | (distance > rho[-1])
    return np.where(outside, np.nan, values)


def _buckets(rho: np.ndarray, bound: np.ndarray, distance: np.ndarray, loss: np.ndarray) -> list:
    # first bucket is closed on the left so trials at rho[0] are counted
    edges = np.searchsorted(rho, distance, side="left")
    buckets = []
    for j in range(rho.size):
        members = edges == j
        if not np.any(members):
            continue
        worst = float(loss[members].max())
        buckets.append(
            BucketGap(
                rho_lo=float(rho[j - 1]) if j > 0 else float(rho[0]),
                rho_hi=float(rho[j]),
                bound=float(bound[j]),
                max_loss=worst,
                trials=int(members.sum()),
                gap=float(bound[j]) - worst,
            )
        )
    return buckets


def validate(
    trials: Sequence[Trial],
    curve: Sequence[CurvePoint],
    tolerance: float = 0.0,
    lookup: Lookup = "linear",
) -> ValidationReport:
    """
    Compare trials with a certifier sweep.

    ``max_violation`` is the largest loss minus bound over evaluated trials,
    ``violations`` counts those above ``tolerance`` and ``tightness_gap`` is
    the smallest bucket gap (bound at the bucket's upper radius minus the
    worst trial loss in (rho_{j-1}, rho_j]). Trials outside the curve's
    radius range are excluded and counted.
    """
    if not trials:
        raise InvalidInputError("no trials to validate")
    if not curve:
        raise InvalidInputError("empty certificate curve")
    rho, bound = _curve_arrays(curve)
    distance = np.array([t.distance for t in trials], dtype=float)
    loss = np.array([t.loss for t in trials], dtype=float)

    at = curve_bound(rho, bound, distance, lookup)
    inside = ~np.isnan(at)
    excluded = int((~inside).sum())
    if not np.any(inside):
        raise InvalidInputError(
            f"no trial distance lies within the curve range [{rho[0]:.6g}, {rho[-1]:.6g}]"
        )

    excess = loss[inside] - at[inside]
    buckets = _buckets(rho, bound, distance[inside], loss[inside])
    report = ValidationReport(
        max_violation=float(excess.max()),
        violations=int((excess > tolerance).sum()),
        tightness_gap=min(b.gap for b in buckets) if buckets else None,
        evaluated=int(inside.sum()),
        excluded=excluded,
        buckets=buckets,
    )
    logger.info("validation_done", **report.summary(), evaluated=report.evaluated, excluded=excluded)
    return report
