"""
Stats Slice - subpopulation statistics and fairness gaps.

Turns raw per-sample losses or predictions into the StatsTable consumed by
both certifiers, and evaluates DP/EO gaps of binary classifiers.
"""
from __future__ import annotations

from typing import Any, Dict, List

from ..slice_base import BaseSlice, Handler, SliceConfig
from .core import (
    LossKind,
    SampleRecord,
    StatsTable,
    aggregate_stats,
    base_rates,
    compute_loss,
    dp_gap,
    eo_gap,
    is_fair_base_rate,
    read_samples_csv,
    with_loss_bound,
)


class StatsConfig(SliceConfig):
    """Stats slice configuration."""
    slice_id: str = "slice_stats"
    slice_name: str = "Stats Slice"
    default_loss: LossKind = LossKind.ZERO_ONE


class SliceStats(BaseSlice):
    """
    Stats slice.

    Operations:
    - compute_loss, aggregate_stats, with_loss_bound
    - dp_gap, eo_gap
    - base_rates, is_fair_base_rate
    """

    slice_id = "slice_stats"
    slice_name = "Stats Slice"
    config_class = StatsConfig

    def _operations(self) -> Dict[str, Handler]:
        return {
            "compute_loss": self._compute_loss,
            "aggregate_stats": self._aggregate_stats,
            "with_loss_bound": self._with_loss_bound,
            "dp_gap": self._dp_gap,
            "eo_gap": self._eo_gap,
            "base_rates": self._base_rates,
            "is_fair_base_rate": self._is_fair_base_rate,
        }

    def _records(self, payload: Dict[str, Any]) -> List[SampleRecord]:
        return [SampleRecord.model_validate(r) for r in payload.get("samples", [])]

    async def _compute_loss(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        kind = LossKind(payload.get("kind", self.config.default_loss))
        return {"loss": compute_loss(payload["prediction"], int(payload["label"]), kind)}

    async def _aggregate_stats(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        kind = LossKind(payload.get("kind", self.config.default_loss))
        S, C = int(payload["S"]), int(payload["C"])
        if "path" in payload:
            samples = read_samples_csv(payload["path"], S, C)
        else:
            samples = self._records(payload)
        table = aggregate_stats(samples, S, C, kind)
        return {"table": table.model_dump()}

    async def _with_loss_bound(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        table = StatsTable.model_validate(payload["table"])
        return {"table": with_loss_bound(table, float(payload["M"])).model_dump()}

    async def _dp_gap(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        return {"gap": dp_gap(self._records(payload), int(payload["S"]), int(payload["C"]))}

    async def _eo_gap(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        return {"gap": eo_gap(self._records(payload), int(payload["S"]), int(payload["C"]))}

    async def _base_rates(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        return {"base_rates": base_rates(payload["q"]).tolist()}

    async def _is_fair_base_rate(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        tol = float(payload.get("tol", 1e-9))
        return {"fair": is_fair_base_rate(payload["q"], tol)}
