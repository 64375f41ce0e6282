"""
Per-cell convex relaxation of the general-shifting problem.

With x = (1 - rho_{s,y}^2)^2 the Gramian bound of one subpopulation reads
(E + C) + 2 sqrt(V) sqrt(x (1 - x)) - C x, so over a cell where the weight
k_s r_y ranges in [K_lo, K_hi] the largest contribution is

    const = K_hi (E+C)_+ + K_lo (E+C)_-
    alpha = K_hi sqrt(V)
    beta  = K_lo (C)_+ + K_hi (C)_-

and the distance constraint relaxes to sum sqrt(p K_hi x) >= 1 - rho^2
with (1 - gamma_bar^2)^2 <= x <= 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ...exceptions import UnboundedLossError
from ...slice_bounds.core import gamma_bar_sq, interval_table, shift_constant
from ...slice_solver.core import max_sqrt_affinity
from ...slice_stats.core import StatsTable


@dataclass
class CellModel:
    """Table-level constants, flattened row-major over (s, y)."""
    S: int
    C: int
    M: float
    threshold: float
    shifted_mean: np.ndarray
    sqrt_var: np.ndarray
    shift: np.ndarray
    lower: np.ndarray
    p: np.ndarray
    p_lo: Optional[np.ndarray] = None
    p_hi: Optional[np.ndarray] = None

    @property
    def finite_sampling(self) -> bool:
        return self.p_lo is not None

    def weights(self, k_lo, k_hi, r_lo, r_hi) -> Tuple[np.ndarray, np.ndarray]:
        """(K_lo, K_hi) for a batch of cells, shape (B, S*C)."""
        k_lo, k_hi, r_lo, r_hi = (np.atleast_2d(v) for v in (k_lo, k_hi, r_lo, r_hi))
        rows = k_lo.shape[0]
        K_lo = (k_lo[:, :, None] * r_lo[:, None, :]).reshape(rows, -1)
        K_hi = (k_hi[:, :, None] * r_hi[:, None, :]).reshape(rows, -1)
        return K_lo, K_hi

    def coefficients(self, K_lo: np.ndarray, K_hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        a = self.shifted_mean
        const = K_hi * np.maximum(a, 0.0) + K_lo * np.minimum(a, 0.0)
        alpha = K_hi * self.sqrt_var
        beta = K_lo * np.maximum(self.shift, 0.0) + K_hi * np.minimum(self.shift, 0.0)
        return const, alpha, beta

    def corner_affinity(self, K_hi: np.ndarray) -> np.ndarray:
        """Largest constraint value of each cell, attained at x = 1."""
        if not self.finite_sampling:
            return np.sqrt(self.p * K_hi).sum(axis=-1)
        return max_sqrt_affinity(K_hi, self.p_lo, self.p_hi)[0]

    def bound_weights(self, K_hi: np.ndarray) -> np.ndarray:
        """Constraint weights dominating every admissible p."""
        p = self.p_hi if self.finite_sampling else self.p
        return np.sqrt(p * K_hi)

    def point_weights(self, K_hi: np.ndarray) -> np.ndarray:
        """Constraint weights at the empirical masses."""
        return np.sqrt(self.p * K_hi)


def _require_bound(stats: StatsTable) -> float:
    if stats.M is None:
        raise UnboundedLossError(
            "general shifting needs a finite loss bound M; clip the loss or use the sensitive scenario"
        )
    return float(stats.M)


def exact_model(stats: StatsTable, rho: float) -> CellModel:
    M = _require_bound(stats)
    E, V = stats.E.reshape(-1), stats.V.reshape(-1)
    shift = np.array([shift_constant(M, e, v) for e, v in zip(E, V)])
    gamma = np.array([gamma_bar_sq(e, v, M) for e, v in zip(E, V)])
    return CellModel(
        S=stats.S,
        C=stats.C,
        M=M,
        threshold=1.0 - rho * rho,
        shifted_mean=E + shift,
        sqrt_var=np.sqrt(V),
        shift=shift,
        lower=(1.0 - gamma) ** 2,
        p=stats.p.reshape(-1),
    )


def finite_sampling_model(stats: StatsTable, rho: float, delta: float) -> CellModel:
    M = _require_bound(stats)
    table = interval_table(stats, delta)
    return CellModel(
        S=stats.S,
        C=stats.C,
        M=M,
        threshold=1.0 - rho * rho,
        shifted_mean=(table.E_hi + table.C_hi).reshape(-1),
        sqrt_var=table.sqrt_V_hi.reshape(-1),
        shift=table.C_lo.reshape(-1),
        lower=((1.0 - table.gamma_sq_hi) ** 2).reshape(-1),
        p=stats.p.reshape(-1),
        p_lo=table.p_lo.reshape(-1),
        p_hi=table.p_hi.reshape(-1),
    )
