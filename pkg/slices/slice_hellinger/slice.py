"""
Hellinger Slice - distances between discrete and Gaussian distributions.
"""
from __future__ import annotations

from typing import Any, Dict

from ..slice_base import BaseSlice, Handler, SliceConfig
from .core import (
    compose_hellinger,
    fair_shift_joint,
    gaussian_shift_distances,
    hellinger_discrete,
    mixture_shift_distance,
    sensitive_shift_distance,
)


class HellingerConfig(SliceConfig):
    slice_id: str = "slice_hellinger"
    slice_name: str = "Hellinger Slice"


class SliceHellinger(BaseSlice):
    """Hellinger distance operations."""

    slice_id = "slice_hellinger"
    slice_name = "Hellinger Slice"
    config_class = HellingerConfig

    def _operations(self) -> Dict[str, Handler]:
        return {
            "hellinger_discrete": self._discrete,
            "compose_hellinger": self._compose,
            "sensitive_shift_distance": self._sensitive,
            "mixture_shift_distance": self._mixture,
            "gaussian_shift_distances": self._gaussian,
            "fair_shift_joint": self._joint,
        }

    async def _discrete(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        return {"distance": hellinger_discrete(payload["p"], payload["q"])}

    async def _compose(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        distance = compose_hellinger(payload["p"], payload["q"], payload["sub_distances"])
        return {"distance": distance}

    async def _sensitive(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        return {"distance": sensitive_shift_distance(payload["p"], payload["q"])}

    async def _mixture(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        return {"distance": mixture_shift_distance(payload["p"], payload["alpha"])}

    async def _gaussian(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        wasserstein, hellinger = gaussian_shift_distances(float(payload["delta_norm"]))
        return {"wasserstein": wasserstein, "hellinger": hellinger}

    async def _joint(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        return {"q": fair_shift_joint(payload["k"], payload["r"]).tolist()}
