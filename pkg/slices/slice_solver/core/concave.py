"""
Projected-gradient augmented-Lagrangian maximizer for ProblemSpec.

Phase 1 maximizes the distance affinity to find a feasible point (or
prove infeasibility), phase 2 runs the PHR augmented Lagrangian on the
single inequality with projected-gradient inner solves.
"""
from __future__ import annotations

from typing import Callable, Optional, Tuple

import numpy as np

from infrastructure.observability import get_logger

from .problem import ProblemSpec, SolveReport, SolverOptions, SolveStatus

logger = get_logger(__name__)

MIN_STEP = 1e-16
MAX_STEP = 1e6


def _projected_descent(
    phi: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    project: Callable[[np.ndarray], np.ndarray],
    max_iter: int,
    tol: float,
) -> Tuple[np.ndarray, int, float]:
    """Minimize phi over the projection set with backtracking line search."""
    step = 1.0
    fx = phi(x)
    stat = np.inf
    for it in range(1, max_iter + 1):
        g = grad(x)
        stat = float(np.linalg.norm(x - project(x - g)))
        if stat <= tol:
            return x, it, stat
        while True:
            x_new = project(x - step * g)
            d = x_new - x
            f_new = phi(x_new)
            if f_new <= fx + float(g @ d) + float(d @ d) / (2.0 * step) or step < MIN_STEP:
                break
            step *= 0.5
        if float(np.linalg.norm(d)) < 1e-15:
            return x, it, stat
        x, fx = x_new, f_new
        step = min(step * 2.0, MAX_STEP)
    return x, max_iter, stat


def _repair(x: np.ndarray, anchor: np.ndarray, spec: ProblemSpec) -> np.ndarray:
    """Blend x toward a feasible anchor until the distance constraint holds."""
    dist = spec.distance
    if dist is None or dist.affinity(x) >= dist.threshold:
        return x
    # affinity is concave, so it is at least linear along the segment
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if dist.affinity((1.0 - mid) * x + mid * anchor) >= dist.threshold:
            hi = mid
        else:
            lo = mid
    return (1.0 - hi) * x + hi * anchor


def maximize_concave(
    spec: ProblemSpec,
    start: Optional[np.ndarray] = None,
    options: Optional[SolverOptions] = None,
) -> SolveReport:
    """
    Maximize spec.objective over the box, equalities and distance constraint.

    Returns Infeasible when the largest attainable affinity stays below the
    threshold by more than the feasibility tolerance. The returned point is
    always feasible when the status is not Infeasible.
    """
    opts = options or SolverOptions()
    x = spec.project(np.asarray(start, dtype=float)) if start is not None else spec.midpoint()
    neg_f = lambda z: -float(spec.objective(z))  # noqa: E731
    neg_g = lambda z: -np.asarray(spec.gradient(z), dtype=float)  # noqa: E731
    dist = spec.distance

    if dist is None:
        x, its, stat = _projected_descent(neg_f, neg_g, x, spec.project, opts.inner_max, opts.stationarity_tol)
        # a stalled line search ends early without reaching the tolerance
        status = SolveStatus.OPTIMAL if stat <= opts.stationarity_tol else SolveStatus.MAX_ITERATIONS
        if status is SolveStatus.MAX_ITERATIONS:
            logger.warning("concave_not_stationary", iterations=its, stationarity=stat)
        return SolveReport(
            status=status, x=x.tolist(), value=float(spec.objective(x)),
            iterations=its, stationarity=stat,
        )

    iterations = 0
    anchor = x
    if dist.affinity(x) < dist.threshold:
        anchor, its, _ = _projected_descent(
            lambda z: -dist.affinity(z), lambda z: -dist.gradient(z),
            x, spec.project, opts.inner_max * 4, opts.stationarity_tol * 1e-2,
        )
        iterations += its
        best = dist.affinity(anchor)
        if best < dist.threshold - opts.feasibility_tol:
            logger.debug("concave_infeasible", affinity=best, threshold=dist.threshold)
            return SolveReport(
                status=SolveStatus.INFEASIBLE, x=anchor.tolist(),
                violation=float(dist.threshold - best), iterations=iterations,
            )

    lam, mu = 0.0, opts.penalty_init
    x = anchor.copy()
    prev_violation = np.inf
    converged = False
    stat = np.inf
    for _ in range(opts.outer_max):
        lam_k, mu_k = lam, mu
        x_prev = x

        def phi(z: np.ndarray) -> float:
            slack = dist.threshold - dist.affinity(z)
            m = max(0.0, lam_k + mu_k * slack)
            return neg_f(z) + (m * m - lam_k * lam_k) / (2.0 * mu_k)

        def dphi(z: np.ndarray) -> np.ndarray:
            slack = dist.threshold - dist.affinity(z)
            m = max(0.0, lam_k + mu_k * slack)
            return neg_g(z) - m * dist.gradient(z)

        x, its, stat = _projected_descent(phi, dphi, x, spec.project, opts.inner_max, opts.stationarity_tol)
        iterations += its
        slack = dist.threshold - dist.affinity(x)
        lam = max(0.0, lam + mu * slack)
        violation = max(0.0, slack)
        moved = float(np.linalg.norm(x - x_prev))
        if violation <= opts.feasibility_tol and (stat <= opts.stationarity_tol or moved <= 1e-12):
            converged = True
            break
        if violation > 0.25 * prev_violation:
            mu = min(mu * 10.0, opts.penalty_max)
        prev_violation = violation

    x = _repair(x, anchor, spec)
    kkt = np.asarray(spec.gradient(x), dtype=float) + lam * dist.gradient(x)
    stationarity = float(np.linalg.norm(x - spec.project(x + kkt)))
    status = SolveStatus.OPTIMAL if converged else SolveStatus.MAX_ITERATIONS
    if not converged:
        logger.warning("concave_max_iterations", iterations=iterations, stationarity=stationarity)
    return SolveReport(
        status=status,
        x=x.tolist(),
        value=float(spec.objective(x)),
        violation=dist.violation(x),
        iterations=iterations,
        stationarity=stationarity,
        extras={"multiplier": lam},
    )
