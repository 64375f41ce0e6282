"""
Solver Slice - bilinear global maximizer, water-filling and batched cell solves.
"""
from __future__ import annotations

import asyncio
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..slice_base import BaseSlice, Handler, SliceConfig
from .core import (
    SolverOptions,
    max_sqrt_affinity,
    maximize_bilinear_simplex,
    maximize_separable_sqrt,
    min_feasible_rho,
)


class SolverConfig(SliceConfig):
    """Solver tunables, overridable through FAIRCERT_* variables."""
    slice_id: str = "slice_solver"
    slice_name: str = "Solver Slice"

    outer_max: int = 200
    inner_max: int = 500
    stationarity_tol: float = 1e-6
    feasibility_tol: float = 1e-8
    sqrt_floor: float = 1e-14
    scan_steps: int = 2000
    polish_rounds: int = 6
    multistarts: int = 16

    def solver_options(self) -> SolverOptions:
        return SolverOptions(
            outer_max=self.outer_max,
            inner_max=self.inner_max,
            stationarity_tol=self.stationarity_tol,
            feasibility_tol=self.feasibility_tol,
            sqrt_floor=self.sqrt_floor,
            scan_steps=self.scan_steps,
            polish_rounds=self.polish_rounds,
            multistarts=self.multistarts,
        )


def _pair(payload: Dict[str, Any], key: str) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    value = payload.get(key)
    if value is None:
        return None
    lo, hi = value
    return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)


class SliceSolver(BaseSlice):
    """Numerical solver operations."""

    slice_id = "slice_solver"
    slice_name = "Solver Slice"
    config_class = SolverConfig

    def _operations(self) -> Dict[str, Handler]:
        return {
            "maximize_bilinear_simplex": self._bilinear,
            "min_feasible_rho": self._min_rho,
            "max_sqrt_affinity": self._affinity,
            "maximize_separable_sqrt": self._separable,
        }

    async def _bilinear(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        report = await asyncio.to_thread(
            maximize_bilinear_simplex,
            np.asarray(payload["E"], dtype=float),
            np.asarray(payload["p"], dtype=float),
            float(payload["rho"]),
            _pair(payload, "k_box"),
            _pair(payload, "r_box"),
            _pair(payload, "p_intervals"),
            self.config.solver_options(),
        )
        return report.model_dump(mode="json")

    async def _min_rho(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        rho = await asyncio.to_thread(
            min_feasible_rho,
            np.asarray(payload["p"], dtype=float),
            _pair(payload, "k_box"),
            _pair(payload, "r_box"),
            _pair(payload, "p_intervals"),
            self.config.solver_options(),
        )
        return {"min_feasible_rho": rho}

    async def _affinity(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        values, p = max_sqrt_affinity(payload["a"], payload["p_lo"], payload["p_hi"])
        return {"value": np.asarray(values).tolist(), "p": p.tolist()}

    async def _separable(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        result = await asyncio.to_thread(
            maximize_separable_sqrt,
            payload["const"],
            payload["alpha"],
            payload["beta"],
            payload["weights"],
            payload["lower"],
            payload["upper"],
            payload["threshold"],
            self.config.solver_options(),
        )
        return {
            "x": result.x.tolist(),
            "values": [None if np.isnan(v) else float(v) for v in result.values],
            "feasible": result.feasible.tolist(),
            "multipliers": result.multipliers.tolist(),
        }
