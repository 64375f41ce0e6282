"""
Certificate and skew types shared by the sensitive and general certifiers.
"""
from __future__ import annotations

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ...exceptions import InvalidInputError

Box = Tuple[np.ndarray, np.ndarray]


class Scenario(str, Enum):
    SENSITIVE = "sensitive"
    GENERAL = "general"


class SkewOptions(BaseModel):
    """Box constraints 0.5 - delta/2 <= k_s (or r_y) <= 0.5 + delta/2."""
    delta_s: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    delta_l: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    @staticmethod
    def _range(delta: Optional[float]) -> Tuple[float, float]:
        if delta is None:
            return 0.0, 1.0
        return 0.5 - delta / 2.0, 0.5 + delta / 2.0

    def k_range(self) -> Tuple[float, float]:
        return self._range(self.delta_s)

    def r_range(self) -> Tuple[float, float]:
        return self._range(self.delta_l)

    def check(self, S: int, C: int) -> None:
        if self.delta_s is not None and S != 2:
            raise InvalidInputError(f"sensitive skew needs a binary sensitive attribute, got S={S}")
        if self.delta_l is not None and C != 2:
            raise InvalidInputError(f"label skew needs a binary label, got C={C}")

    def k_box(self, S: int) -> Optional[Box]:
        if self.delta_s is None:
            return None
        if S != 2:
            raise InvalidInputError(f"sensitive skew needs a binary sensitive attribute, got S={S}")
        lo, hi = self.k_range()
        return np.full(S, lo), np.full(S, hi)

    def r_box(self, C: int) -> Optional[Box]:
        if self.delta_l is None:
            return None
        if C != 2:
            raise InvalidInputError(f"label skew needs a binary label, got C={C}")
        lo, hi = self.r_range()
        return np.full(C, lo), np.full(C, hi)


class Certificate(BaseModel):
    """Upper bound on the shifted expected loss at radius rho."""
    scenario: Scenario
    rho: float = Field(gt=0.0, le=1.0)
    feasible: bool
    value: Optional[float] = None
    k: List[float] = Field(default_factory=list)
    r: List[float] = Field(default_factory=list)
    confidence: float = Field(default=1.0, ge=0.0, le=1.0)
    min_feasible_rho: Optional[float] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
    # general scenario only
    T: Optional[int] = None
    winning_cell: Optional[Dict[str, Any]] = None
    x: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _value_iff_feasible(self) -> "Certificate":
        if self.feasible and self.value is None:
            raise ValueError("a feasible certificate needs a value")
        if not self.feasible and self.value is not None:
            raise ValueError("an infeasible certificate carries no value")
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        data = self.model_dump(mode="json")
        if self.scenario is Scenario.SENSITIVE:
            for key in ("T", "winning_cell", "x"):
                data.pop(key, None)
        return data
