"""
Domain types for subpopulation loss statistics.

A subpopulation is a (sensitive value s, label y) cell. Indices are 0-based
everywhere, in files as in APIs.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ...exceptions import InvalidInputError

MASS_TOLERANCE = 1e-9


class LossKind(str, Enum):
    """Supported per-sample losses."""
    ZERO_ONE = "zeroone"
    BCE = "bce"
    JSD = "jsd"

    @property
    def bound(self) -> Optional[float]:
        """Loss upper bound M, None for unbounded losses."""
        return None if self is LossKind.BCE else 1.0


class SubpopKey(BaseModel):
    """(sensitive value, label) index pair."""
    model_config = ConfigDict(frozen=True)

    s: int = Field(ge=0)
    y: int = Field(ge=0)


class SampleRecord(BaseModel):
    """One sample: its cell plus either a loss or a prediction vector."""
    key: SubpopKey
    loss: Optional[float] = Field(default=None, ge=0.0)
    prediction: Optional[List[float]] = None

    @model_validator(mode="after")
    def _one_payload(self) -> "SampleRecord":
        if (self.loss is None) == (self.prediction is None):
            raise ValueError("exactly one of loss or prediction must be given")
        if self.prediction is not None:
            check_probability_vector(np.asarray(self.prediction, dtype=float))
        return self


def check_probability_vector(vec: np.ndarray) -> None:
    """Raise InvalidInputError unless vec is a probability vector."""
    if vec.ndim != 1 or vec.size == 0:
        raise InvalidInputError("prediction must be a non-empty 1-D vector")
    if not np.all(np.isfinite(vec)) or np.any(vec < 0.0) or np.any(vec > 1.0):
        raise InvalidInputError("prediction entries must lie in [0, 1]")
    if abs(float(vec.sum()) - 1.0) > MASS_TOLERANCE:
        raise InvalidInputError(
            f"prediction must sum to 1 within {MASS_TOLERANCE}, got {vec.sum():.12g}"
        )


@dataclass
class SampleBatch:
    """
    Column-oriented samples.

    ``loss`` or ``predictions`` (n x C) is populated; ``shifted_loss`` holds the
    per-sample loss on the disjointly transformed copy when supplied.
    """
    s: np.ndarray
    y: np.ndarray
    loss: Optional[np.ndarray] = None
    predictions: Optional[np.ndarray] = None
    shifted_loss: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.s = np.asarray(self.s, dtype=np.int64)
        self.y = np.asarray(self.y, dtype=np.int64)
        n = self.s.shape[0]
        if self.y.shape[0] != n:
            raise InvalidInputError("s and y columns differ in length")
        if self.loss is not None:
            self.loss = np.asarray(self.loss, dtype=float)
            if self.loss.shape[0] != n:
                raise InvalidInputError("loss column length mismatch")
        if self.predictions is not None:
            self.predictions = np.atleast_2d(np.asarray(self.predictions, dtype=float))
            if self.predictions.shape[0] != n:
                raise InvalidInputError("prediction rows length mismatch")
        if self.shifted_loss is not None:
            self.shifted_loss = np.asarray(self.shifted_loss, dtype=float)
            if self.shifted_loss.shape[0] != n:
                raise InvalidInputError("shifted_loss column length mismatch")

    def __len__(self) -> int:
        return int(self.s.shape[0])

    @classmethod
    def from_records(cls, records: Sequence[SampleRecord]) -> "SampleBatch":
        if not records:
            raise InvalidInputError("no samples given")
        with_loss = [r.loss is not None for r in records]
        if any(with_loss) and not all(with_loss):
            raise InvalidInputError("samples mix loss and prediction records")
        s = [r.key.s for r in records]
        y = [r.key.y for r in records]
        if all(with_loss):
            return cls(s=s, y=y, loss=[r.loss for r in records])
        widths = {len(r.prediction) for r in records}
        if len(widths) != 1:
            raise InvalidInputError("prediction vectors differ in length")
        return cls(s=s, y=y, predictions=[r.prediction for r in records])

    def check_keys(self, S: int, C: int) -> None:
        """Raise on the first sample whose key lies outside S x C."""
        bad = np.nonzero((self.s < 0) | (self.s >= S) | (self.y < 0) | (self.y >= C))[0]
        if bad.size:
            i = int(bad[0])
            raise InvalidInputError(
                f"sample {i} has key (s={self.s[i]}, y={self.y[i]}) outside S={S}, C={C}"
            )


class SubpopStats(BaseModel):
    """Per-cell statistics."""
    s: int = Field(ge=0)
    y: int = Field(ge=0)
    n: int = Field(ge=0)
    E: float = Field(ge=0.0)
    V: float = Field(ge=0.0)
    p: float = Field(ge=0.0, le=1.0)


class StatsTable(BaseModel):
    """Complete S x C grid of SubpopStats plus the loss bound M."""
    S: int = Field(ge=1)
    C: int = Field(ge=1)
    M: Optional[float] = Field(default=None, gt=0.0)
    cells: List[SubpopStats]

    @model_validator(mode="after")
    def _check_grid(self) -> "StatsTable":
        seen = set()
        for cell in self.cells:
            if cell.s >= self.S or cell.y >= self.C:
                raise ValueError(f"cell (s={cell.s}, y={cell.y}) outside {self.S}x{self.C}")
            if (cell.s, cell.y) in seen:
                raise ValueError(f"duplicate cell (s={cell.s}, y={cell.y})")
            seen.add((cell.s, cell.y))
            if self.M is not None and cell.E > self.M:
                raise ValueError(
                    f"cell (s={cell.s}, y={cell.y}) has E={cell.E} above M={self.M}"
                )
        if len(seen) != self.S * self.C:
            raise ValueError(f"expected {self.S * self.C} cells, got {len(seen)}")
        total = sum(cell.p for cell in self.cells)
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"cell masses sum to {total:.12g}, expected 1")
        self.cells = sorted(self.cells, key=lambda c: (c.s, c.y))
        return self

    def cell(self, s: int, y: int) -> SubpopStats:
        return self.cells[s * self.C + y]

    def _matrix(self, attr: str) -> np.ndarray:
        return np.array([getattr(c, attr) for c in self.cells], dtype=float).reshape(
            self.S, self.C
        )

    @property
    def E(self) -> np.ndarray:
        return self._matrix("E")

    @property
    def V(self) -> np.ndarray:
        return self._matrix("V")

    @property
    def p(self) -> np.ndarray:
        return self._matrix("p")

    @property
    def n(self) -> np.ndarray:
        return np.array([c.n for c in self.cells], dtype=np.int64).reshape(self.S, self.C)

    @property
    def total(self) -> int:
        return int(sum(c.n for c in self.cells))

    @property
    def bounded(self) -> bool:
        return self.M is not None

    @property
    def is_binary(self) -> bool:
        return self.S == 2 and self.C == 2
