"""
General Slice - grid-relaxed certificates against general shifting.
"""
from __future__ import annotations

import asyncio
from typing import Any, Dict, Optional

from ..slice_base import BaseSlice, Handler, SliceConfig
from ..slice_sensitive.core import SkewOptions
from ..slice_solver import SolverConfig
from ..slice_stats.core import StatsTable
from .core import (
    CellBounds,
    SweepOptions,
    cell_bound,
    cell_prebound,
    certify_general,
    certify_general_fs,
    certify_general_sweep,
)


class GeneralConfig(SliceConfig):
    """Cell sweep tunables, overridable through FAIRCERT_* variables."""
    slice_id: str = "slice_general"
    slice_name: str = "General Slice"
    default_T: int = 200
    default_delta: float = 0.1
    prune: bool = True
    batch_size: int = 4096
    jobs: int = 1
    warn_above: int = 1_000_000

    def sweep_options(self, jobs: Optional[int] = None) -> SweepOptions:
        return SweepOptions(
            prune=self.prune,
            batch_size=self.batch_size,
            jobs=jobs or self.jobs,
            warn_above=self.warn_above,
        )


class SliceGeneral(BaseSlice):
    """General-shifting certification operations."""

    slice_id = "slice_general"
    slice_name = "General Slice"
    config_class = GeneralConfig

    def __init__(self, config: Optional[GeneralConfig] = None, solver: Optional[SolverConfig] = None):
        super().__init__(config)
        self._solver = solver or SolverConfig()

    def _operations(self) -> Dict[str, Handler]:
        return {
            "certify": self._certify,
            "certify_fs": self._certify_fs,
            "certify_sweep": self._sweep,
            "cell_bound": self._cell_bound,
            "cell_prebound": self._cell_prebound,
        }

    def _common(self, payload: Dict[str, Any]):
        stats = StatsTable.model_validate(payload["stats"])
        skew = SkewOptions.model_validate(payload.get("skew") or {})
        T = int(payload.get("T", self.config.default_T))
        return stats, skew, T, self.config.sweep_options(payload.get("jobs"))

    async def _certify(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        stats, skew, T, opts = self._common(payload)
        cert = await asyncio.to_thread(
            certify_general, stats, float(payload["rho"]), T, skew, opts, self._solver.solver_options()
        )
        return cert.to_json_dict()

    async def _certify_fs(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        stats, skew, T, opts = self._common(payload)
        delta = float(payload.get("delta", self.config.default_delta))
        cert = await asyncio.to_thread(
            certify_general_fs, stats, float(payload["rho"]), T, delta, skew, opts, self._solver.solver_options()
        )
        return cert.to_json_dict()

    async def _sweep(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        stats, skew, T, opts = self._common(payload)
        delta = payload.get("delta")
        certs = await asyncio.to_thread(
            certify_general_sweep,
            stats,
            [float(r) for r in payload["rhos"]],
            T,
            skew,
            None if delta is None else float(delta),
            opts,
            self._solver.solver_options(),
        )
        return {"certificates": [c.to_json_dict() for c in certs]}

    async def _cell_bound(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        stats = StatsTable.model_validate(payload["stats"])
        cell = CellBounds.model_validate(payload["cell"])
        delta = payload.get("delta")
        result = await asyncio.to_thread(
            cell_bound, cell, stats, float(payload["rho"]),
            None if delta is None else float(delta), self._solver.solver_options(),
        )
        return result.model_dump(mode="json")

    async def _cell_prebound(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        stats = StatsTable.model_validate(payload["stats"])
        cell = CellBounds.model_validate(payload["cell"])
        delta = payload.get("delta")
        value = cell_prebound(cell, stats, float(payload["rho"]), None if delta is None else float(delta))
        return {"prebound": value}
