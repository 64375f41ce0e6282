"""
General-shifting fairness certificates.

The bound is the largest relaxed cell value over a uniform partition of
the (k, r) simplices. Cells are screened cheaply first (coverage, the
x = 1 feasibility corner, and a Lagrangian upper bound), then solved in
descending order of that bound so later cells can be pruned against the
incumbent without changing the result.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from infrastructure.observability import get_logger, get_metrics, trace_operation

from ...exceptions import InvalidInputError
from ...slice_bounds.core import union_confidence
from ...slice_sensitive.core import Certificate, Scenario, SkewOptions
from ...slice_solver.core import (
    DistanceConstraint,
    LinearEquality,
    ProblemSpec,
    SolverOptions,
    SolveStatus,
    dual_value,
    max_sqrt_affinity,
    maximize_concave,
    maximize_separable_sqrt,
    separable_objective,
)
from ...slice_stats.core import StatsTable
from .cells import CellBounds, CellGrid, enumerate_cells
from .relax import CellModel, exact_model, finite_sampling_model

logger = get_logger(__name__)

PRUNE_SLACK = 1e-12
DUAL_GRID = np.concatenate([[0.0], np.logspace(-4.0, 4.0, 9)])
FIRST_BATCH = 256
# chunks per wave, independent of jobs
WAVE_CHUNKS = 4


class CellStatus(str, Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    PRUNED = "Pruned"


class CellResult(BaseModel):
    cell: CellBounds
    status: CellStatus
    value: Optional[float] = None
    x: Optional[List[List[float]]] = None
    p: Optional[List[List[float]]] = None


class SweepOptions(BaseModel):
    """Cell sweep tunables."""
    prune: bool = True
    batch_size: int = Field(default=4096, ge=1)
    jobs: int = Field(default=1, ge=1)
    warn_above: int = Field(default=1_000_000, ge=1)


# =============================================================================
# Row solvers
# =============================================================================

@dataclass
class _Rows:
    """Solved cells: values, x and (finite sampling) p, one row per cell."""
    values: np.ndarray
    x: np.ndarray
    p: Optional[np.ndarray] = None
    max_iterations: int = 0


def _upper_bounds(model: CellModel, K_lo: np.ndarray, K_hi: np.ndarray) -> np.ndarray:
    const, alpha, beta = model.coefficients(K_lo, K_hi)
    weights = model.bound_weights(K_hi)
    lower = np.broadcast_to(model.lower, K_hi.shape)
    upper = np.ones_like(K_hi)
    bounds = np.full(K_hi.shape[0], np.inf)
    for lam in DUAL_GRID:
        bounds = np.minimum(
            bounds, dual_value(const, alpha, beta, weights, lower, upper, model.threshold, lam)
        )
    return bounds


def _solve_exact(model: CellModel, K_lo: np.ndarray, K_hi: np.ndarray, opts: SolverOptions) -> _Rows:
    const, alpha, beta = model.coefficients(K_lo, K_hi)
    result = maximize_separable_sqrt(
        const, alpha, beta, model.point_weights(K_hi),
        np.broadcast_to(model.lower, K_hi.shape), np.ones_like(K_hi), model.threshold, opts,
    )
    return _Rows(values=result.values, x=result.x)


def _fs_cell_spec(model: CellModel, const, alpha, beta, K_hi) -> ProblemSpec:
    n = K_hi.size
    floor = 1e-14

    def objective(z: np.ndarray) -> float:
        return float(separable_objective(const, alpha, beta, z[:n]))

    def gradient(z: np.ndarray) -> np.ndarray:
        xc = np.clip(z[:n], floor, 1.0 - floor)
        grad = np.zeros_like(z)
        grad[:n] = alpha * (1.0 - 2.0 * xc) / np.sqrt(xc * (1.0 - xc)) - beta
        return grad

    return ProblemSpec(
        dimension=2 * n,
        objective=objective,
        gradient=gradient,
        lower=np.concatenate([model.lower, model.p_lo]),
        upper=np.concatenate([np.ones(n), model.p_hi]),
        equalities=[LinearEquality(indices=list(range(n, 2 * n)), rhs=1.0)],
        distance=DistanceConstraint(
            threshold=model.threshold,
            coefs=np.sqrt(K_hi).tolist(),
            terms=[(i, n + i) for i in range(n)],
        ),
    )


def _solve_fs(model: CellModel, K_lo: np.ndarray, K_hi: np.ndarray, opts: SolverOptions) -> _Rows:
    const, alpha, beta = model.coefficients(K_lo, K_hi)
    n = K_hi.shape[1]
    # candidates at the empirical masses are feasible points of the cell problem
    at_p = maximize_separable_sqrt(
        const, alpha, beta, model.point_weights(K_hi),
        np.broadcast_to(model.lower, K_hi.shape), np.ones_like(K_hi), model.threshold, opts,
    )
    bounds = _upper_bounds(model, K_lo, K_hi)
    values = np.full(K_hi.shape[0], np.nan)
    xs = np.ones_like(K_hi)
    ps = np.tile(model.p, (K_hi.shape[0], 1))
    capped = 0
    for i in range(K_hi.shape[0]):
        if at_p.feasible[i]:
            values[i], xs[i] = at_p.values[i], at_p.x[i]
            if bounds[i] - values[i] <= opts.stationarity_tol:
                continue
            start = np.concatenate([at_p.x[i], model.p])
        else:
            p_corner = max_sqrt_affinity(K_hi[i], model.p_lo, model.p_hi)[1]
            start = np.concatenate([np.ones(n), p_corner])
        report = maximize_concave(_fs_cell_spec(model, const[i], alpha[i], beta[i], K_hi[i]), start, opts)
        if report.status is SolveStatus.MAX_ITERATIONS:
            capped += 1
        if report.ok and report.violation <= opts.feasibility_tol and not (report.value <= values[i]):
            z = np.asarray(report.x)
            values[i], xs[i], ps[i] = report.value, z[:n], z[n:]
    return _Rows(values=values, x=xs, p=ps, max_iterations=capped)


def _solve_rows(model: CellModel, K_lo, K_hi, opts: SolverOptions) -> _Rows:
    if model.finite_sampling:
        return _solve_fs(model, K_lo, K_hi, opts)
    return _solve_exact(model, K_lo, K_hi, opts)


# =============================================================================
# Sweep
# =============================================================================

@dataclass
class SweepOutcome:
    value: float = -math.inf
    flat: Optional[int] = None
    x: Optional[np.ndarray] = None
    p: Optional[np.ndarray] = None
    max_affinity: float = 0.0
    counts: Dict[str, int] = field(default_factory=dict)

    def offer(self, value: float, flat: int, x: np.ndarray, p: Optional[np.ndarray]) -> None:
        if not np.isfinite(value):
            return
        if value > self.value or (value == self.value and self.flat is not None and flat < self.flat):
            self.value, self.flat, self.x, self.p = float(value), int(flat), x.copy(), None if p is None else p.copy()


def sweep_cells(
    model: CellModel,
    grid: CellGrid,
    options: Optional[SweepOptions] = None,
    solver_options: Optional[SolverOptions] = None,
) -> SweepOutcome:
    """Maximize the relaxed cell value over every cell of ``grid``."""
    opts = options or SweepOptions()
    sopts = solver_options or SolverOptions()
    total = len(grid)
    t = model.threshold

    bounds = np.full(total, -np.inf)
    feasible = np.zeros(total, dtype=bool)
    incumbent = -np.inf
    max_aff = 0.0
    for start in range(0, total, opts.batch_size):
        idx = np.arange(start, min(start + opts.batch_size, total))
        K_lo, K_hi = model.weights(*grid.bounds(idx))
        corner = model.corner_affinity(K_hi)
        max_aff = max(max_aff, float(corner.max(initial=0.0)))
        ok = corner >= t
        feasible[idx] = ok
        if ok.any():
            bounds[idx[ok]] = _upper_bounds(model, K_lo[ok], K_hi[ok])
            const, alpha, beta = model.coefficients(K_lo[ok], K_hi[ok])
            seeds = separable_objective(const, alpha, beta, np.ones_like(const))
            incumbent = max(incumbent, float(seeds.max()))

    candidates = np.flatnonzero(feasible)
    order = candidates[np.lexsort((candidates, -bounds[candidates]))]
    outcome = SweepOutcome(max_affinity=max_aff)
    solved = pruned = capped = 0

    def solve(rows: np.ndarray) -> _Rows:
        K_lo, K_hi = model.weights(*grid.bounds(rows))
        return _solve_rows(model, K_lo, K_hi, sopts)

    pos, size = 0, min(FIRST_BATCH, opts.batch_size)
    with ThreadPoolExecutor(max_workers=opts.jobs) as pool:
        while pos < len(order):
            wave: List[np.ndarray] = []
            for _ in range(WAVE_CHUNKS):
                rows = order[pos:pos + size]
                pos += len(rows)
                if opts.prune:
                    keep = bounds[rows] >= incumbent - PRUNE_SLACK
                    pruned += int((~keep).sum())
                    rows = rows[keep]
                if len(rows):
                    wave.append(rows)
                if pos >= len(order):
                    break
            if not wave:
                if opts.prune:
                    # bounds are sorted: nothing further can beat the incumbent
                    pruned += len(order) - pos
                    break
                continue
            for rows, result in zip(wave, pool.map(solve, wave)):
                solved += len(rows)
                capped += result.max_iterations
                for j, flat in enumerate(rows):
                    outcome.offer(
                        result.values[j], int(flat), result.x[j], None if result.p is None else result.p[j]
                    )
            incumbent = max(incumbent, outcome.value)
            size = min(size * 2, opts.batch_size)

    outcome.counts = {
        "cells": total,
        "dropped": grid.dropped,
        "infeasible": int(total - len(candidates)),
        "solved": solved,
        "pruned": pruned,
        "max_iterations": capped,
    }
    logger.debug("cell_sweep_done", **outcome.counts, value=outcome.value)
    get_metrics().increment("cells_solved_total", value=solved)
    get_metrics().increment("cells_pruned_total", value=pruned)
    return outcome


# =============================================================================
# Public operations
# =============================================================================

def _check(rho: float, delta: Optional[float]) -> float:
    rho = float(rho)
    if not 0.0 < rho <= 1.0:
        raise InvalidInputError(f"rho must lie in (0, 1], got {rho}")
    if delta is not None and not 0.0 < delta < 1.0:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")
    return rho


def _model(stats: StatsTable, rho: float, delta: Optional[float]) -> CellModel:
    if delta is None:
        return exact_model(stats, rho)
    return finite_sampling_model(stats, rho, delta)


def _cell_arrays(cell: CellBounds) -> Tuple[np.ndarray, ...]:
    return tuple(np.asarray(v, dtype=float)[None, :] for v in (cell.k_lo, cell.k_hi, cell.r_lo, cell.r_hi))


def cell_prebound(cell: CellBounds, stats: StatsTable, rho: float, delta: Optional[float] = None) -> float:
    """Cell objective maximized over its x box with the distance constraint dropped."""
    model = _model(stats, _check(rho, delta), delta)
    K_lo, K_hi = model.weights(*_cell_arrays(cell))
    const, alpha, beta = model.coefficients(K_lo, K_hi)
    value = dual_value(
        const, alpha, beta, model.bound_weights(K_hi), model.lower[None, :], np.ones_like(K_hi), model.threshold, 0.0
    )
    return float(value[0])


def cell_bound(
    cell: CellBounds,
    stats: StatsTable,
    rho: float,
    delta: Optional[float] = None,
    solver_options: Optional[SolverOptions] = None,
) -> CellResult:
    """Relaxed maximum of one cell; exact statistics unless delta is given."""
    model = _model(stats, _check(rho, delta), delta)
    if len(cell.k_lo) != model.S or len(cell.r_lo) != model.C:
        raise InvalidInputError("cell dimensions do not match the statistics table")
    if not cell.covers_simplices():
        return CellResult(cell=cell, status=CellStatus.INFEASIBLE)
    K_lo, K_hi = model.weights(*_cell_arrays(cell))
    if model.corner_affinity(K_hi)[0] < model.threshold:
        return CellResult(cell=cell, status=CellStatus.INFEASIBLE)
    rows = _solve_rows(model, K_lo, K_hi, solver_options or SolverOptions())
    if not np.isfinite(rows.values[0]):
        return CellResult(cell=cell, status=CellStatus.INFEASIBLE)
    shape = (model.S, model.C)
    return CellResult(
        cell=cell,
        status=CellStatus.FEASIBLE,
        value=float(rows.values[0]),
        x=rows.x[0].reshape(shape).tolist(),
        p=None if rows.p is None else rows.p[0].reshape(shape).tolist(),
    )


def _certify(
    stats: StatsTable,
    rho: float,
    T: int,
    delta: Optional[float],
    skew: Optional[SkewOptions],
    options: Optional[SweepOptions],
    solver_options: Optional[SolverOptions],
) -> Certificate:
    rho = _check(rho, delta)
    opts = options or SweepOptions()
    model = _model(stats, rho, delta)
    grid = enumerate_cells(stats.S, stats.C, T, skew, opts.warn_above)
    outcome = sweep_cells(model, grid, opts, solver_options)

    mode = "exact" if delta is None else "finite_sampling"
    confidence = 1.0 if delta is None else union_confidence(stats.S, stats.C, delta, 3)
    min_rho = math.sqrt(max(0.0, 1.0 - min(outcome.max_affinity, 1.0)))
    diagnostics: Dict[str, Any] = {"mode": mode, **outcome.counts}
    if delta is not None:
        diagnostics["delta"] = delta

    if outcome.flat is None:
        cert = Certificate(
            scenario=Scenario.GENERAL, rho=rho, feasible=False, confidence=confidence,
            min_feasible_rho=min_rho, diagnostics=diagnostics, T=T,
        )
    else:
        cell = grid.cell(outcome.flat)
        shape = (stats.S, stats.C)
        diagnostics["relaxation_value"] = outcome.value
        if outcome.p is not None:
            diagnostics["p"] = outcome.p.reshape(shape).tolist()
        cert = Certificate(
            scenario=Scenario.GENERAL,
            rho=rho,
            feasible=True,
            value=float(min(outcome.value, model.M)),
            k=cell.midpoint_k(),
            r=cell.midpoint_r(),
            confidence=confidence,
            min_feasible_rho=min_rho,
            diagnostics=diagnostics,
            T=T,
            winning_cell=cell.model_dump(),
            x=outcome.x.reshape(shape).tolist(),
        )
    get_metrics().increment(
        "certificates_total",
        labels={"scenario": "general", "mode": mode, "feasible": str(cert.feasible).lower()},
    )
    logger.info("certificate_computed", scenario="general", mode=mode, rho=rho, T=T,
                feasible=cert.feasible, value=cert.value)
    return cert


@trace_operation("certify_general")
def certify_general(
    stats: StatsTable,
    rho: float,
    T: int = 200,
    skew: Optional[SkewOptions] = None,
    options: Optional[SweepOptions] = None,
    solver_options: Optional[SolverOptions] = None,
) -> Certificate:
    """Exact-statistics general-shifting certificate; needs a finite loss bound."""
    return _certify(stats, rho, T, None, skew, options, solver_options)


@trace_operation("certify_general_fs")
def certify_general_fs(
    stats: StatsTable,
    rho: float,
    T: int,
    delta: float,
    skew: Optional[SkewOptions] = None,
    options: Optional[SweepOptions] = None,
    solver_options: Optional[SolverOptions] = None,
) -> Certificate:
    """Finite-sampling certificate holding with probability 1 - 3SC delta."""
    return _certify(stats, rho, T, delta, skew, options, solver_options)


def certify_general_sweep(
    stats: StatsTable,
    rhos: Iterable[float],
    T: int = 200,
    skew: Optional[SkewOptions] = None,
    delta: Optional[float] = None,
    options: Optional[SweepOptions] = None,
    solver_options: Optional[SolverOptions] = None,
) -> List[Certificate]:
    """Certificates for each radius in ascending order."""
    return [
        _certify(stats, rho, T, delta, skew, options, solver_options)
        for rho in sorted(_check(r, delta) for r in rhos)
    ]
