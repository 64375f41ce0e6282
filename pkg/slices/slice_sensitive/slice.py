"""
Sensitive Slice - tight certificates against sensitive shifting.
"""
from __future__ import annotations

import asyncio
from typing import Any, Dict, Optional

from ..slice_base import BaseSlice, Handler, SliceConfig
from ..slice_solver import SolverConfig
from ..slice_stats.core import StatsTable
from .core import SkewOptions, certify_sensitive, certify_sensitive_fs, certify_sweep


class SensitiveConfig(SliceConfig):
    slice_id: str = "slice_sensitive"
    slice_name: str = "Sensitive Slice"
    default_delta: float = 0.1


class SliceSensitive(BaseSlice):
    """Sensitive-shifting certification operations."""

    slice_id = "slice_sensitive"
    slice_name = "Sensitive Slice"
    config_class = SensitiveConfig

    def __init__(self, config: Optional[SensitiveConfig] = None, solver: Optional[SolverConfig] = None):
        super().__init__(config)
        self._solver = solver or SolverConfig()

    def _operations(self) -> Dict[str, Handler]:
        return {
            "certify": self._certify,
            "certify_fs": self._certify_fs,
            "certify_sweep": self._sweep,
        }

    @staticmethod
    def _inputs(payload: Dict[str, Any]):
        stats = StatsTable.model_validate(payload["stats"])
        skew = SkewOptions.model_validate(payload.get("skew") or {})
        return stats, skew

    async def _certify(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        stats, skew = self._inputs(payload)
        cert = await asyncio.to_thread(
            certify_sensitive, stats, float(payload["rho"]), skew, self._solver.solver_options()
        )
        return cert.to_json_dict()

    async def _certify_fs(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        stats, skew = self._inputs(payload)
        delta = float(payload.get("delta", self.config.default_delta))
        cert = await asyncio.to_thread(
            certify_sensitive_fs, stats, float(payload["rho"]), delta, skew, self._solver.solver_options()
        )
        return cert.to_json_dict()

    async def _sweep(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        stats, skew = self._inputs(payload)
        delta = payload.get("delta")
        certs = await asyncio.to_thread(
            certify_sweep,
            stats,
            [float(r) for r in payload["rhos"]],
            skew,
            None if delta is None else float(delta),
            self._solver.solver_options(),
        )
        return {"certificates": [c.to_json_dict() for c in certs]}
