"""
Fairgen Slice - fair-distribution trials and curve validation.
"""
from __future__ import annotations

import asyncio
from typing import Any, Dict, List, Optional

from ..exceptions import InvalidInputError
from ..slice_base import BaseSlice, Handler, SliceConfig
from ..slice_general.core import SweepPoint
from ..slice_stats.core import LossKind, SampleBatch
from .core import (
    GaussianMixtureSpec,
    ShiftTrial,
    TrialPoint,
    demo_batch,
    gen_gaussian_mixture,
    gen_general_trials,
    gen_sensitive_trials,
    validate,
)


class FairgenConfig(SliceConfig):
    """Simulation tunables, overridable through FAIRCERT_* variables."""
    slice_id: str = "slice_fairgen"
    slice_name: str = "Fairgen Slice"
    disjoint_offset: float = 1e6
    max_rejections: int = 1000
    default_trials: int = 3000


class SliceFairgen(BaseSlice):
    """Trial generation and validation operations."""

    slice_id = "slice_fairgen"
    slice_name = "Fairgen Slice"
    config_class = FairgenConfig

    def _operations(self) -> Dict[str, Handler]:
        return {
            "gen_gaussian": self._gen_gaussian,
            "gen_sensitive_trials": self._gen_sensitive,
            "gen_general_trials": self._gen_general,
            "validate": self._validate,
        }

    def demo_samples(self, n: int, seed: int, kind: LossKind = LossKind.ZERO_ONE) -> SampleBatch:
        """Gaussian-mixture samples scored by the bundled linear scorer."""
        dataset = gen_gaussian_mixture(GaussianMixtureSpec(), n, seed)
        return demo_batch(dataset, kind=kind, offset=self.config.disjoint_offset)

    def _samples(self, payload: Dict[str, Any]) -> SampleBatch:
        kind = LossKind(payload.get("loss", LossKind.ZERO_ONE))
        if payload.get("demo_gaussian"):
            return self.demo_samples(int(payload["demo_gaussian"]), int(payload.get("seed", 0)), kind)
        samples = payload.get("samples")
        if not samples:
            raise InvalidInputError("payload needs samples or demo_gaussian")
        return SampleBatch(
            s=samples["s"],
            y=samples["y"],
            loss=samples.get("loss"),
            predictions=samples.get("predictions"),
            shifted_loss=samples.get("shifted_loss"),
        )

    def _trial_count(self, payload: Dict[str, Any]) -> int:
        return int(payload.get("n_trials", self.config.default_trials))

    @staticmethod
    def _dump(trials: List[ShiftTrial]) -> Dict[str, Any]:
        return {"trials": [t.model_dump(mode="json") for t in trials]}

    async def _gen_gaussian(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        spec = GaussianMixtureSpec.model_validate(payload.get("spec") or {})
        dataset = await asyncio.to_thread(gen_gaussian_mixture, spec, int(payload["n"]), int(payload.get("seed", 0)))
        return {
            "features": dataset.features.tolist(),
            "s": dataset.s.tolist(),
            "y": dataset.y.tolist(),
        }

    async def _gen_sensitive(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        samples = self._samples(payload)
        trials = await asyncio.to_thread(
            gen_sensitive_trials,
            samples,
            self._trial_count(payload),
            int(payload.get("seed", 0)),
            LossKind(payload.get("loss", LossKind.ZERO_ONE)),
        )
        return self._dump(trials)

    async def _gen_general(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        samples = self._samples(payload)
        trials = await asyncio.to_thread(
            gen_general_trials,
            samples,
            self._trial_count(payload),
            int(payload.get("seed", 0)),
            LossKind(payload.get("loss", LossKind.ZERO_ONE)),
            self.config.max_rejections,
        )
        return self._dump(trials)

    async def _validate(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        trials = [
            ShiftTrial.model_validate(t) if "q" in t else TrialPoint.model_validate(t) for t in payload["trials"]
        ]
        curve = [SweepPoint.model_validate(p) for p in payload["curve"]]
        report = validate(
            trials,
            curve,
            tolerance=float(payload.get("tolerance", 0.0)),
            lookup=payload.get("lookup", "linear"),
        )
        return report.model_dump(mode="json")
