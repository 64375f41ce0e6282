"""
Concentration intervals for cell means, standard deviations and masses.

Each interval holds with probability at least 1 - delta on its own; union
bounds over cells are the certifiers' business.
"""
from __future__ import annotations

import math
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ...exceptions import InvalidInputError
from ...slice_stats.core import StatsTable
from .gramian import DENOMINATOR_GUARD, gamma_bar_sq


class Interval(BaseModel):
    """Closed interval [lo, hi]."""
    lo: float
    hi: float

    @model_validator(mode="after")
    def _ordered(self) -> "Interval":
        if self.lo > self.hi:
            raise ValueError(f"interval lower end {self.lo} above upper end {self.hi}")
        return self

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")


def mean_interval(mean_hat: float, n: int, M: float, delta: float) -> Interval:
    """Hoeffding: mean_hat +- M sqrt(ln(2/delta) / (2n)), clamped to [0, M]."""
    _check_delta(delta)
    if n < 1:
        raise InvalidInputError("mean interval needs n >= 1")
    if M <= 0:
        raise InvalidInputError("loss bound M must be positive")
    half = M * math.sqrt(math.log(2.0 / delta) / (2.0 * n))
    return Interval(lo=min(max(mean_hat - half, 0.0), M), hi=min(max(mean_hat + half, 0.0), M))


def std_interval(s_n: float, n: int, M: float, delta: float) -> Interval:
    """
    Interval on the standard deviation: s_n +- M sqrt(2 ln(2/delta) / (n - 1)).

    The upper end is capped at M/2, the largest standard deviation of a
    [0, M]-valued variable.
    """
    _check_delta(delta)
    if n < 2:
        raise InvalidInputError("std interval needs n >= 2")
    if M <= 0:
        raise InvalidInputError("loss bound M must be positive")
    half = M * math.sqrt(2.0 * math.log(2.0 / delta) / (n - 1))
    cap = M / 2.0
    lo = min(max(s_n - half, 0.0), cap)
    return Interval(lo=lo, hi=max(min(s_n + half, cap), lo))


def proportion_interval(count: int, total: int, delta: float) -> Interval:
    """count/total +- sqrt(ln(2/delta) / (2 total)), clamped to [0, 1]."""
    _check_delta(delta)
    if total < 1:
        raise InvalidInputError("proportion interval needs total >= 1")
    if count < 0 or count > total:
        raise InvalidInputError(f"count {count} outside [0, {total}]")
    center = count / total
    half = math.sqrt(math.log(2.0 / delta) / (2.0 * total))
    return Interval(lo=max(center - half, 0.0), hi=min(center + half, 1.0))


def union_confidence(S: int, C: int, delta: float, quantities: int) -> float:
    """1 - quantities * S * C * delta, floored at 0."""
    return max(0.0, 1.0 - quantities * S * C * delta)


class CellIntervals(BaseModel):
    """Intervals for one (s, y) cell plus the derived quantities."""
    s: int
    y: int
    E: Interval
    sqrt_V: Interval
    p: Interval
    C_lo: float
    C_hi: float
    gamma_sq_hi: float = Field(ge=0.0, le=1.0)


class IntervalTable(BaseModel):
    """All per-cell intervals of a StatsTable at confidence parameter delta."""
    S: int
    C: int
    M: float
    delta: float
    cells: List[CellIntervals]

    def _matrix(self, fn) -> np.ndarray:
        return np.array([fn(c) for c in self.cells], dtype=float).reshape(self.S, self.C)

    @property
    def E_lo(self) -> np.ndarray:
        return self._matrix(lambda c: c.E.lo)

    @property
    def E_hi(self) -> np.ndarray:
        return self._matrix(lambda c: c.E.hi)

    @property
    def sqrt_V_lo(self) -> np.ndarray:
        return self._matrix(lambda c: c.sqrt_V.lo)

    @property
    def sqrt_V_hi(self) -> np.ndarray:
        return self._matrix(lambda c: c.sqrt_V.hi)

    @property
    def p_lo(self) -> np.ndarray:
        return self._matrix(lambda c: c.p.lo)

    @property
    def p_hi(self) -> np.ndarray:
        return self._matrix(lambda c: c.p.hi)

    @property
    def C_lo(self) -> np.ndarray:
        return self._matrix(lambda c: c.C_lo)

    @property
    def C_hi(self) -> np.ndarray:
        return self._matrix(lambda c: c.C_hi)

    @property
    def gamma_sq_hi(self) -> np.ndarray:
        return self._matrix(lambda c: c.gamma_sq_hi)


def shift_constant(M: float, E: float, V: float) -> float:
    """C = M - E - V / (M - E); V = 0 gives M - E."""
    gap = M - E
    if V == 0.0:
        return gap
    return gap - V / max(gap, DENOMINATOR_GUARD)


def shift_constant_range(M: float, E: Interval, V_lo: float, V_hi: float) -> Tuple[float, float]:
    """
    Range of C = M - E - V / (M - E) over the mean and variance intervals.

    C falls as E or V grows. The lower end is floored at M - 2 E_hi, since
    any [0, M]-valued loss has V <= E (M - E); a mean interval reaching M
    therefore gives C_lo = -M instead of a division by a vanishing gap.
    """
    floor = M - 2.0 * E.hi
    gap_hi = M - E.hi
    lo = floor if gap_hi <= DENOMINATOR_GUARD else max(gap_hi - V_hi / gap_hi, floor)
    gap_lo = M - E.lo
    hi = gap_lo if gap_lo <= DENOMINATOR_GUARD else gap_lo - V_lo / gap_lo
    return lo, max(hi, lo)


def interval_table(stats: StatsTable, delta: float) -> IntervalTable:
    """
    Build every interval of ``stats`` and the derived bounds:
    the range of C from shift_constant_range and the gamma^2 upper end from
    (E_lo, V_hi).
    """
    _check_delta(delta)
    if stats.M is None:
        raise InvalidInputError("finite-sampling intervals need a finite loss bound M")
    M = float(stats.M)
    total = stats.total
    cells = []
    for cell in stats.cells:
        if cell.n < 2:
            raise InvalidInputError(f"cell (s={cell.s}, y={cell.y}) needs n >= 2")
        e = mean_interval(cell.E, cell.n, M, delta)
        sd = std_interval(math.sqrt(cell.V), cell.n, M, delta)
        pr = proportion_interval(cell.n, total, delta)
        c_lo, c_hi = shift_constant_range(M, e, sd.lo ** 2, sd.hi ** 2)
        cells.append(
            CellIntervals(
                s=cell.s,
                y=cell.y,
                E=e,
                sqrt_V=sd,
                p=pr,
                C_lo=c_lo,
                C_hi=c_hi,
                gamma_sq_hi=gamma_bar_sq(e.lo, sd.hi ** 2, M),
            )
        )
    return IntervalTable(S=stats.S, C=stats.C, M=M, delta=delta, cells=cells)
