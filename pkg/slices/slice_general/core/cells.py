"""
Uniform partition of the (k, r) simplices into cells.

Binary dimensions partition only coordinate 0; coordinate 1 takes the
complementary interval [1 - hi, 1 - lo]. Other dimensions are enumerated
in full and filtered by the coverage test sum(lo) <= 1 <= sum(hi).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, model_validator

from infrastructure.observability import get_logger

from ...exceptions import InvalidInputError
from ...slice_sensitive.core import SkewOptions

logger = get_logger(__name__)

COVERAGE_SLACK = 1e-12


class CellBounds(BaseModel):
    """One cell: per-coordinate bounds on k and r, and its grid index."""
    index: List[int]
    k_lo: List[float]
    k_hi: List[float]
    r_lo: List[float]
    r_hi: List[float]

    @model_validator(mode="after")
    def _check_bounds(self) -> "CellBounds":
        for lo, hi in ((self.k_lo, self.k_hi), (self.r_lo, self.r_hi)):
            if len(lo) != len(hi):
                raise ValueError("lower and upper bounds differ in length")
            for a, b in zip(lo, hi):
                if not 0.0 <= a <= b <= 1.0:
                    raise ValueError(f"cell bounds must satisfy 0 <= lo <= hi <= 1, got [{a}, {b}]")
        return self

    def covers_simplices(self) -> bool:
        return all(
            sum(lo) <= 1.0 + COVERAGE_SLACK and sum(hi) >= 1.0 - COVERAGE_SLACK
            for lo, hi in ((self.k_lo, self.k_hi), (self.r_lo, self.r_hi))
        )

    def midpoint_k(self) -> List[float]:
        return [(a + b) / 2.0 for a, b in zip(self.k_lo, self.k_hi)]

    def midpoint_r(self) -> List[float]:
        return [(a + b) / 2.0 for a, b in zip(self.r_lo, self.r_hi)]


@dataclass
class AxisCells:
    lo: np.ndarray
    hi: np.ndarray
    index: np.ndarray
    dropped: int = 0

    def __len__(self) -> int:
        return int(self.lo.shape[0])


def _axis_cells(n: int, T: int, span: Tuple[float, float]) -> AxisCells:
    if n == 2:
        edges = np.linspace(span[0], span[1], T + 1)
        lo0, hi0 = edges[:-1], edges[1:]
        return AxisCells(
            lo=np.stack([lo0, 1.0 - hi0], axis=1),
            hi=np.stack([hi0, 1.0 - lo0], axis=1),
            index=np.arange(T)[:, None],
        )
    edges = np.linspace(0.0, 1.0, T + 1)
    idx = np.indices((T,) * n).reshape(n, -1).T
    lo, hi = edges[idx], edges[idx + 1]
    keep = (lo.sum(axis=1) <= 1.0 + COVERAGE_SLACK) & (hi.sum(axis=1) >= 1.0 - COVERAGE_SLACK)
    return AxisCells(lo=lo[keep], hi=hi[keep], index=idx[keep], dropped=int((~keep).sum()))


@dataclass
class CellGrid:
    """All cells as the product of k-axis and r-axis cells, k-major."""
    T: int
    k: AxisCells
    r: AxisCells

    def __len__(self) -> int:
        return len(self.k) * len(self.r)

    @property
    def dropped(self) -> int:
        return self.k.dropped * (len(self.r) + self.r.dropped) + len(self.k) * self.r.dropped

    def bounds(self, flat: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        ki, ri = np.divmod(np.asarray(flat, dtype=np.int64), len(self.r))
        return self.k.lo[ki], self.k.hi[ki], self.r.lo[ri], self.r.hi[ri]

    def cell(self, flat: int) -> CellBounds:
        ki, ri = divmod(int(flat), len(self.r))
        return CellBounds(
            index=[int(i) for i in self.k.index[ki]] + [int(i) for i in self.r.index[ri]],
            k_lo=self.k.lo[ki].tolist(),
            k_hi=self.k.hi[ki].tolist(),
            r_lo=self.r.lo[ri].tolist(),
            r_hi=self.r.hi[ri].tolist(),
        )


def enumerate_cells(
    S: int,
    C: int,
    T: int,
    skew: Optional[SkewOptions] = None,
    warn_above: int = 1_000_000,
) -> CellGrid:
    """
    Build the cell grid for granularity T.

    Skew clips the partitioned range of k_0 (r_0) to 0.5 -/+ delta/2.
    """
    if T < 1:
        raise InvalidInputError(f"granularity T must be at least 1, got {T}")
    skew = skew or SkewOptions()
    skew.check(S, C)
    raw = (T if S == 2 else T ** S) * (T if C == 2 else T ** C)
    if raw > warn_above:
        logger.warning("cost_warning", cells=raw, S=S, C=C, T=T)
    grid = CellGrid(T=T, k=_axis_cells(S, T, skew.k_range()), r=_axis_cells(C, T, skew.r_range()))
    logger.debug("cells_enumerated", cells=len(grid), dropped=grid.dropped, T=T)
    return grid
