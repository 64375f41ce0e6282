"""
Bounds Slice - concentration intervals and the Gramian shifted-loss bound.
"""
from __future__ import annotations

from typing import Any, Dict

from ..slice_base import BaseSlice, Handler, SliceConfig
from ..slice_stats.core import StatsTable
from .core import (
    gamma_bar_sq,
    gramian_upper_bound,
    interval_table,
    mean_interval,
    proportion_interval,
    std_interval,
)


class BoundsConfig(SliceConfig):
    """Bounds slice configuration."""
    slice_id: str = "slice_bounds"
    slice_name: str = "Bounds Slice"
    default_delta: float = 0.1


class SliceBounds(BaseSlice):
    """Interval and Gramian-bound operations."""

    slice_id = "slice_bounds"
    slice_name = "Bounds Slice"
    config_class = BoundsConfig

    def _operations(self) -> Dict[str, Handler]:
        return {
            "mean_interval": self._mean_interval,
            "std_interval": self._std_interval,
            "proportion_interval": self._proportion_interval,
            "gamma_bar_sq": self._gamma_bar_sq,
            "gramian_upper_bound": self._gramian,
            "interval_table": self._interval_table,
        }

    def _delta(self, payload: Dict[str, Any]) -> float:
        return float(payload.get("delta", self.config.default_delta))

    async def _mean_interval(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        interval = mean_interval(
            float(payload["mean_hat"]), int(payload["n"]), float(payload["M"]), self._delta(payload)
        )
        return interval.model_dump()

    async def _std_interval(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        interval = std_interval(
            float(payload["s_n"]), int(payload["n"]), float(payload["M"]), self._delta(payload)
        )
        return interval.model_dump()

    async def _proportion_interval(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        interval = proportion_interval(
            int(payload["count"]), int(payload["total"]), self._delta(payload)
        )
        return interval.model_dump()

    async def _gamma_bar_sq(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        value = gamma_bar_sq(float(payload["E"]), float(payload["V"]), float(payload["M"]))
        return {"gamma_bar_sq": value}

    async def _gramian(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        bound = gramian_upper_bound(
            float(payload["E"]), float(payload["V"]), float(payload["M"]), float(payload["rho"])
        )
        return {"bound": bound}

    async def _interval_table(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        table = StatsTable.model_validate(payload["table"])
        return {"intervals": interval_table(table, self._delta(payload)).model_dump()}
