"""
Batched exact solver for the separable square-root cell problem

    max  sum_i c_i + 2 a_i sqrt(x_i (1 - x_i)) - b_i x_i
    s.t. sum_i w_i sqrt(x_i) >= t,   lo_i <= x_i <= hi_i <= 1

with a_i, w_i >= 0. Each coordinate is concave and the constraint is
concave, so a single multiplier lambda >= 0 decouples the problem: for a
fixed lambda every coordinate is a one-dimensional concave maximization,
and the constraint value is non-decreasing in lambda.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .problem import SQRT_FLOOR, SolverOptions

COORD_STEPS = 48
DOUBLING_CAP = 80


@dataclass
class SeparableResult:
    """Per-row solution of a batch."""
    x: np.ndarray
    values: np.ndarray
    feasible: np.ndarray
    multipliers: np.ndarray

    def __len__(self) -> int:
        return int(self.values.shape[0])


def separable_objective(const, alpha, beta, x) -> np.ndarray:
    """Row sums of c + 2 a sqrt(x(1-x)) - b x."""
    x = np.clip(x, 0.0, 1.0)
    return np.sum(const + 2.0 * alpha * np.sqrt(x * (1.0 - x)) - beta * x, axis=-1)


def _derivative(x, alpha, beta, lam_w, floor):
    xc = np.clip(x, floor, 1.0 - floor)
    return (
        alpha * (1.0 - 2.0 * xc) / np.sqrt(xc * (1.0 - xc))
        - beta
        + lam_w / (2.0 * np.sqrt(xc))
    )


def coordinate_argmax(alpha, beta, lam_w, lower, upper, floor: float = SQRT_FLOOR, steps: int = COORD_STEPS):
    """
    argmax over [lower, upper] of 2 a sqrt(x(1-x)) - b x + lam_w sqrt(x).

    Elementwise; bisection on the derivative.
    """
    lo = np.array(lower, dtype=float, copy=True)
    hi = np.array(upper, dtype=float, copy=True)
    d_hi = _derivative(hi, alpha, beta, lam_w, floor)
    d_lo = _derivative(lo, alpha, beta, lam_w, floor)
    a, b = lo.copy(), hi.copy()
    for _ in range(steps):
        mid = 0.5 * (a + b)
        up = _derivative(mid, alpha, beta, lam_w, floor) > 0
        a = np.where(up, mid, a)
        b = np.where(up, b, mid)
    inner = 0.5 * (a + b)
    return np.where(d_hi >= 0, hi, np.where(d_lo <= 0, lo, inner))


def dual_value(const, alpha, beta, weights, lower, upper, threshold, lam) -> np.ndarray:
    """
    Lagrangian dual function per row; an upper bound on the row optimum for
    any lam >= 0.
    """
    lam = np.asarray(lam, dtype=float)
    lam_col = lam[..., None] if lam.ndim else lam
    x = coordinate_argmax(alpha, beta, lam_col * weights, lower, upper)
    primal = separable_objective(const, alpha, beta, x)
    return primal + lam * (np.sum(weights * np.sqrt(x), axis=-1) - threshold)


def maximize_separable_sqrt(
    const: np.ndarray,
    alpha: np.ndarray,
    beta: np.ndarray,
    weights: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    threshold: Union[float, np.ndarray],
    options: Optional[SolverOptions] = None,
) -> SeparableResult:
    """
    Solve a (B, n) batch of separable cell problems.

    Rows whose constraint cannot hold even at x = upper are infeasible and
    get NaN values. Returned x is always feasible for feasible rows: the
    multiplier search keeps its feasible end.
    """
    opts = options or SolverOptions()
    const, alpha, beta, weights, lower, upper = (
        np.atleast_2d(np.asarray(v, dtype=float)) for v in (const, alpha, beta, weights, lower, upper)
    )
    alpha, beta, weights, lower, upper = np.broadcast_arrays(alpha, beta, weights, lower, upper)
    rows = alpha.shape[0]
    t = np.broadcast_to(np.asarray(threshold, dtype=float), (rows,))

    def affinity(x):
        return np.sum(weights * np.sqrt(np.maximum(x, 0.0)), axis=-1)

    def solve_at(lam):
        return coordinate_argmax(alpha, beta, lam[:, None] * weights, lower, upper, opts.sqrt_floor)

    zero = np.zeros(rows)
    x = solve_at(zero)
    feasible = affinity(upper) >= t
    free = affinity(x) >= t
    active = feasible & ~free

    lam_lo = np.zeros(rows)
    lam_hi = np.where(active, 1.0, 0.0)
    if active.any():
        for _ in range(DOUBLING_CAP):
            short = active & (affinity(solve_at(lam_hi)) < t)
            if not short.any():
                break
            lam_lo = np.where(short, lam_hi, lam_lo)
            lam_hi = np.where(short, lam_hi * 2.0, lam_hi)
        for _ in range(opts.bisection_steps):
            mid = 0.5 * (lam_lo + lam_hi)
            ok = affinity(solve_at(mid)) >= t
            lam_hi = np.where(active & ok, mid, lam_hi)
            lam_lo = np.where(active & ~ok, mid, lam_lo)
        x_hi = solve_at(lam_hi)
        # constraint still short after the doubling cap: the box corner is the only feasible point
        stuck = active & (affinity(x_hi) < t)
        x_hi = np.where(stuck[:, None], upper, x_hi)
        x = np.where(active[:, None], x_hi, x)

    values = separable_objective(const, alpha, beta, x)
    values = np.where(feasible, values, np.nan)
    return SeparableResult(
        x=x, values=values, feasible=feasible, multipliers=np.where(active, lam_hi, 0.0)
    )
