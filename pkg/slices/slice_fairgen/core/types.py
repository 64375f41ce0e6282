"""
Simulation records: generated trials, the Gaussian-mixture demo spec and
validation reports.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

MASS_TOLERANCE = 1e-9
DISJOINT_OFFSET = 1e6
MAX_REJECTIONS = 1000


class ShiftTrial(BaseModel):
    """One generated fair distribution and the loss measured on its sample."""
    distance: float = Field(ge=0.0, le=1.0)
    loss: float
    q: List[float]
    alpha: Optional[List[float]] = None
    alpha_prime: Optional[List[float]] = None
    seed: int
    size: int = Field(default=0, ge=0)

    @field_validator("q")
    @classmethod
    def _unit_mass(cls, q: List[float]) -> List[float]:
        if abs(sum(q) - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"trial masses must sum to 1, got {sum(q):.12g}")
        return q

    def point(self) -> "TrialPoint":
        return TrialPoint(seed=self.seed, distance=self.distance, loss=self.loss)


class TrialPoint(BaseModel):
    """The (seed, distance, loss) projection of a trial stored in trials CSV."""
    seed: int
    distance: float = Field(ge=0.0, le=1.0)
    loss: float


class GaussianMixtureSpec(BaseModel):
    """Two isotropic Gaussians labeled 0 and 1; s = 1 iff coordinate 1 > 0."""
    means: Tuple[Tuple[float, float], Tuple[float, float]] = ((-2.0, -0.5), (2.0, 0.5))
    scales: Tuple[float, float] = (1.0, 1.0)
    weights: Tuple[float, float] = (0.5, 0.5)

    @model_validator(mode="after")
    def _check(self) -> "GaussianMixtureSpec":
        if any(s < 0 for s in self.scales):
            raise ValueError("scales must be non-negative")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > MASS_TOLERANCE:
            raise ValueError("weights must be non-negative and sum to 1")
        return self


@dataclass
class GaussianDataset:
    features: np.ndarray
    s: np.ndarray
    y: np.ndarray

    def __len__(self) -> int:
        return int(self.y.shape[0])


class BucketGap(BaseModel):
    rho_lo: float
    rho_hi: float
    bound: float
    max_loss: float
    trials: int
    gap: float


class ValidationReport(BaseModel):
    """Certificate curve against simulated trials."""
    max_violation: float
    violations: int
    tightness_gap: Optional[float] = None
    evaluated: int = 0
    excluded: int = 0
    buckets: List[BucketGap] = Field(default_factory=list)

    def summary(self) -> dict:
        return {
            "max_violation": self.max_violation,
            "violations": self.violations,
            "tightness_gap": self.tightness_gap,
        }
