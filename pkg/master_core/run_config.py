"""
Run configuration for the command-line front end.

Precedence: command-line flags > key=value config file > FAIRCERT_*
environment variables > defaults.
"""
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

import numpy as np
from pydantic import Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from slices.exceptions import InvalidInputError
from slices.slice_bounds.core import union_confidence
from slices.slice_sensitive.core import SkewOptions
from slices.slice_stats.core import LossKind

Scenario = Literal["sensitive", "general"]


def _parse_rho_list(raw: str) -> List[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as e:
        raise ValueError(f"rho list must be comma-separated numbers: {raw!r}") from e


class RunConfig(BaseSettings):
    """Everything one CLI invocation needs."""
    model_config = SettingsConfigDict(env_prefix="FAIRCERT_", extra="ignore")

    scenario: Scenario = "sensitive"
    rho: Optional[str] = None
    rho_start: Optional[float] = None
    rho_stop: Optional[float] = None
    rho_step: Optional[float] = None
    granularity: int = Field(default=200, ge=1)
    finite_sampling: bool = False
    delta: float = Field(default=0.1, gt=0.0, lt=1.0)
    skew_s: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    skew_y: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    stats: Optional[Path] = None
    samples: Optional[Path] = None
    sweep: Optional[Path] = None
    trials_csv: Optional[Path] = None
    S: int = Field(default=2, ge=1)
    C: int = Field(default=2, ge=1)
    loss: LossKind = LossKind.ZERO_ONE
    M: Optional[float] = Field(default=None, gt=0.0)

    out: Path = Path("out")
    seed: int = 0
    jobs: int = Field(default=1, ge=1)
    trials: int = Field(default=3000, ge=0)
    demo_gaussian: Optional[int] = Field(default=None, ge=1)
    tolerance: float = 0.0
    lookup: Literal["linear", "step"] = "linear"
    log_level: str = "WARNING"

    @field_validator("rho")
    @classmethod
    def _rho_list(cls, v: Optional[str]) -> Optional[str]:
        if v is not None:
            values = _parse_rho_list(v)
            if not values:
                raise ValueError("rho list is empty")
            for value in values:
                if not 0.0 < value <= 1.0:
                    raise ValueError(f"rho values must lie in (0, 1], got {value}")
        return v

    @field_validator("rho_step")
    @classmethod
    def _positive_step(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and v <= 0:
            raise ValueError(f"rho step must be positive, got {v}")
        return v

    @field_validator("stats", "samples", "sweep", "trials_csv")
    @classmethod
    def _exists(cls, v: Optional[Path]) -> Optional[Path]:
        if v is not None and not v.is_file():
            raise ValueError(f"file not found: {v}")
        return v

    @model_validator(mode="after")
    def _rho_range(self) -> "RunConfig":
        given = [self.rho_start, self.rho_stop, self.rho_step]
        if any(v is not None for v in given):
            if any(v is None for v in given):
                raise ValueError("rho range needs start, stop and step together")
            if not 0.0 < self.rho_start <= self.rho_stop <= 1.0:
                raise ValueError("rho range needs 0 < start <= stop <= 1")
            if self.rho is not None:
                raise ValueError("give either a rho list or a rho range, not both")
        return self

    def rhos(self) -> List[float]:
        """Radii to certify, ascending; the range includes stop within 1e-9."""
        if self.rho is not None:
            return sorted(_parse_rho_list(self.rho))
        if self.rho_start is None:
            raise InvalidInputError("no radius given; use --rho or --rho-start/--rho-stop/--rho-step")
        count = int(np.floor((self.rho_stop - self.rho_start) / self.rho_step + 1e-9)) + 1
        values = self.rho_start + self.rho_step * np.arange(count)
        return [float(v) for v in np.round(values, 12) if v <= 1.0]

    def skew_options(self) -> SkewOptions:
        return SkewOptions(delta_s=self.skew_s, delta_l=self.skew_y)

    def overall_confidence(self, S: int, C: int) -> float:
        quantities = 2 if self.scenario == "sensitive" else 3
        return union_confidence(S, C, self.delta, quantities)


def read_config_file(path: Path) -> Dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment line."""
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"config file not found: {path}")
    values: Dict[str, str] = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise InvalidInputError(f"expected key=value in {path}", line=number)
        values[key.strip().lower().replace("-", "_")] = value.strip()
    return values


def load_run_config(flags: Mapping[str, Any], config_file: Optional[Path] = None) -> RunConfig:
    """Merge file values under flag values; env and defaults fill the rest."""
    names = {name.lower(): name for name in RunConfig.model_fields}
    from_file = read_config_file(config_file) if config_file else {}
    merged: Dict[str, Any] = {names.get(k, k): v for k, v in from_file.items()}
    merged.update({k: v for k, v in flags.items() if v is not None})
    unknown = set(merged) - set(RunConfig.model_fields)
    if unknown:
        raise InvalidInputError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        raise InvalidInputError(f"invalid configuration: {e}") from e
