"""
Global maximization of the bilinear sensitive-shift objective

    max  sum_{s,y} k_s r_y E_{s,y}
    s.t. k, r on their simplices (optionally boxed),
         sum_{s,y} sqrt(p_{s,y} k_s r_y) >= 1 - rho^2,

with p fixed or free within per-cell intervals, and the smallest radius
for which the constraint set is non-empty.

For the binary-binary case the search is exhaustive: a scan over k_0, and
for every k_0 the feasible r_0 range is an interval (the affinity is
concave in r_0), so the linear objective peaks at one of its two ends.
Larger instances use multi-start block alternation and are flagged.
"""
from __future__ import annotations

import math
from typing import Callable, List, Optional, Tuple

import numpy as np

from infrastructure.observability import get_logger

from ...exceptions import InvalidInputError
from .concave import maximize_concave
from .problem import (
    DistanceConstraint,
    LinearEquality,
    ProblemSpec,
    SolveReport,
    SolverOptions,
    SolveStatus,
)
from .projection import max_sqrt_affinity

logger = get_logger(__name__)

Box = Optional[Tuple[np.ndarray, np.ndarray]]
Intervals = Optional[Tuple[np.ndarray, np.ndarray]]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN_STEPS = 80
ALTERNATION_STEPS = 200
ALTERNATION_TOL = 1e-13
FEASIBILITY_SLACK = 1e-8


# =============================================================================
# Shared helpers
# =============================================================================

def _check_inputs(E: Optional[np.ndarray], p: np.ndarray, p_intervals: Intervals) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise InvalidInputError("p must be an S x C matrix")
    if np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-9:
        raise InvalidInputError("p must be non-negative and sum to 1")
    if E is not None and np.asarray(E).shape != p.shape:
        raise InvalidInputError("E and p must have the same shape")
    if p_intervals is not None:
        lo, hi = (np.asarray(v, dtype=float) for v in p_intervals)
        if lo.shape != p.shape or hi.shape != p.shape or np.any(lo > hi):
            raise InvalidInputError("p intervals must match p and satisfy lo <= hi")
        if float(lo.sum()) > 1.0 + 1e-12 or float(hi.sum()) < 1.0 - 1e-12:
            raise InvalidInputError("p intervals admit no unit-sum point")
    return p


def _binary_range(box: Box, n: int, name: str) -> Tuple[float, float]:
    """Range of coordinate 0 on the 2-simplex intersected with a box."""
    if box is None:
        return 0.0, 1.0
    if n != 2:
        raise InvalidInputError(f"a box on {name} requires a binary dimension, got {n}")
    lo, hi = (np.asarray(v, dtype=float) for v in box)
    a = max(float(lo[0]), 1.0 - float(hi[1]), 0.0)
    b = min(float(hi[0]), 1.0 - float(lo[1]), 1.0)
    if a > b + 1e-15:
        raise InvalidInputError(f"box on {name} leaves no point on the simplex")
    return a, max(a, b)


def _grid(lo: float, hi: float, steps: int) -> np.ndarray:
    return np.unique(np.linspace(lo, hi, steps + 1))


def _golden_peak(f: Callable[[np.ndarray], np.ndarray], a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Elementwise maximizer of a unimodal f on [a, b]; endpoints included."""
    a0, b0 = a.copy(), b.copy()
    for _ in range(GOLDEN_STEPS):
        c = b - INV_PHI * (b - a)
        d = a + INV_PHI * (b - a)
        left = f(c) >= f(d)
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    best = 0.5 * (a + b)
    f_best = f(best)
    for edge in (a0, b0):
        f_edge = f(edge)
        better = f_edge > f_best
        best = np.where(better, edge, best)
        f_best = np.where(better, f_edge, f_best)
    return best, f_best


class _BinaryAffinity:
    """sum sqrt(p q) for q = (k0 r0, k0 r1, k1 r0, k1 r1); p fixed or interval-free."""

    def __init__(self, p: np.ndarray, p_intervals: Intervals):
        self.p = p.reshape(-1)
        self.intervals = None
        if p_intervals is not None:
            self.intervals = tuple(np.asarray(v, dtype=float).reshape(-1) for v in p_intervals)

    @staticmethod
    def joint(k0, r0) -> np.ndarray:
        k0, r0 = np.broadcast_arrays(np.asarray(k0, dtype=float), np.asarray(r0, dtype=float))
        q = np.stack([k0 * r0, k0 * (1.0 - r0), (1.0 - k0) * r0, (1.0 - k0) * (1.0 - r0)], axis=-1)
        return np.maximum(q, 0.0)

    def __call__(self, k0, r0) -> np.ndarray:
        q = self.joint(k0, r0)
        if self.intervals is None:
            return np.sqrt(self.p * q).sum(axis=-1)
        return max_sqrt_affinity(q, *self.intervals)[0]

    def masses(self, k0: float, r0: float) -> np.ndarray:
        if self.intervals is None:
            return self.p.copy()
        return max_sqrt_affinity(self.joint(k0, r0), *self.intervals)[1]


def _refine(
    evaluate: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    lo: float,
    hi: float,
    center: float,
    value: float,
    aux: float,
    width: float,
    opts: SolverOptions,
) -> Tuple[float, float, float]:
    """Shrinking-grid polish of a 1-D scan around its best point."""
    for _ in range(opts.polish_rounds):
        if width <= 0:
            break
        grid = np.linspace(max(lo, center - 2.0 * width), min(hi, center + 2.0 * width), opts.polish_points)
        vals, auxs = evaluate(grid)
        j = int(np.argmax(vals))
        if vals[j] > value:
            center, value, aux = float(grid[j]), float(vals[j]), float(auxs[j])
        width = 4.0 * width / (opts.polish_points - 1)
    return center, value, aux


def _outer_objective(E: np.ndarray, k0, r0) -> np.ndarray:
    q = _BinaryAffinity.joint(k0, r0)
    return q @ E.reshape(-1)


# =============================================================================
# Largest affinity (minimum feasible radius)
# =============================================================================

def _closed_form_block(B: np.ndarray, box_range: Optional[Tuple[float, float]]) -> np.ndarray:
    """argmax_k sum_s B_s sqrt(k_s) on the simplex: k proportional to B^2."""
    sq = B * B
    total = sq.sum()
    if total <= 0:
        return np.full(B.shape, 1.0 / B.size)
    k = sq / total
    if box_range is not None:
        k0 = min(max(k[0], box_range[0]), box_range[1])
        k = np.array([k0, 1.0 - k0])
    return k


def _binary_max_affinity(
    p: np.ndarray, k_range: Tuple[float, float], r_range: Tuple[float, float], p_intervals: Intervals, opts: SolverOptions
) -> Tuple[float, float, float]:
    aff = _BinaryAffinity(p, p_intervals)

    def evaluate(k_values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        r_peak, g = _golden_peak(
            lambda r: aff(k_values, r),
            np.full(k_values.shape, r_range[0]),
            np.full(k_values.shape, r_range[1]),
        )
        return g, r_peak

    grid = _grid(*k_range, opts.scan_steps)
    vals, r_peaks = evaluate(grid)
    j = int(np.argmax(vals))
    width = (k_range[1] - k_range[0]) / opts.scan_steps
    k0, best, r0 = _refine(evaluate, *k_range, float(grid[j]), float(vals[j]), float(r_peaks[j]), width, opts)
    return best, k0, r0


def _alternating_max_affinity(
    p: np.ndarray, k_box: Box, r_box: Box, p_intervals: Intervals, opts: SolverOptions
) -> Tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Block ascent on the jointly concave affinity; closed form per block."""
    S, C = p.shape
    k_range = _binary_range(k_box, S, "k") if k_box is not None else None
    r_range = _binary_range(r_box, C, "r") if r_box is not None else None
    best = (-np.inf, None, None, None)
    for k, r in _starts(p, S, C, opts):
        P = p
        prev = -np.inf
        for _ in range(ALTERNATION_STEPS):
            if p_intervals is not None:
                P = max_sqrt_affinity(np.outer(k, r).reshape(-1), *(np.asarray(v).reshape(-1) for v in p_intervals))[1].reshape(S, C)
            k = _closed_form_block(np.sqrt(P * r[None, :]).sum(axis=1), k_range)
            r = _closed_form_block(np.sqrt(P * k[:, None]).sum(axis=0), r_range)
            value = float(np.sqrt(P * np.outer(k, r)).sum())
            if value - prev < ALTERNATION_TOL:
                break
            prev = value
        if value > best[0]:
            best = (value, k.copy(), r.copy(), P.copy())
    return best


def _starts(p: np.ndarray, S: int, C: int, opts: SolverOptions):
    """Deterministic start points: marginals, uniform, then seeded Dirichlet draws."""
    rng = np.random.default_rng(0)
    yield p.sum(axis=1), p.sum(axis=0)
    yield np.full(S, 1.0 / S), np.full(C, 1.0 / C)
    for _ in range(max(opts.multistarts - 2, 0)):
        yield rng.dirichlet(np.ones(S)), rng.dirichlet(np.ones(C))


def max_affinity(
    p: np.ndarray,
    k_box: Box = None,
    r_box: Box = None,
    p_intervals: Intervals = None,
    options: Optional[SolverOptions] = None,
) -> Tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """
    max over k, r (and p within intervals) of sum sqrt(p_{s,y} k_s r_y).

    Returns (value, k, r, p).
    """
    opts = options or SolverOptions()
    p = _check_inputs(None, p, p_intervals)
    S, C = p.shape

    if p_intervals is None and C == 2 and (k_box is None or S == 2):
        # scan r_0, closed form in k
        r_range = _binary_range(r_box, C, "r")
        k_range = _binary_range(k_box, S, "k") if k_box is not None else None

        def evaluate(r_values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            B = np.sqrt(p[:, 0:1] * r_values[None, :]) + np.sqrt(p[:, 1:2] * (1.0 - r_values[None, :]))
            if k_range is None:
                return np.sqrt((B * B).sum(axis=0)), np.zeros_like(r_values)
            sq = B * B
            k0 = np.clip(sq[0] / np.maximum(sq.sum(axis=0), 1e-300), *k_range)
            return np.sqrt(k0) * B[0] + np.sqrt(1.0 - k0) * B[1], k0

        grid = _grid(*r_range, opts.scan_steps)
        vals, _ = evaluate(grid)
        j = int(np.argmax(vals))
        width = (r_range[1] - r_range[0]) / opts.scan_steps
        r0, _, _ = _refine(evaluate, *r_range, float(grid[j]), float(vals[j]), 0.0, width, opts)
        r = np.array([r0, 1.0 - r0])
        k = _closed_form_block(np.sqrt(p * r[None, :]).sum(axis=1), k_range)
        return float(np.sqrt(p * np.outer(k, r)).sum()), k, r, p.copy()

    if p_intervals is None and S == 2 and r_box is None:
        # scan k_0, closed form in r
        k_range = _binary_range(k_box, S, "k")

        def evaluate(k_values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            D = np.sqrt(p[0][:, None] * k_values[None, :]) + np.sqrt(p[1][:, None] * (1.0 - k_values[None, :]))
            return np.sqrt((D * D).sum(axis=0)), np.zeros_like(k_values)

        grid = _grid(*k_range, opts.scan_steps)
        vals, _ = evaluate(grid)
        j = int(np.argmax(vals))
        width = (k_range[1] - k_range[0]) / opts.scan_steps
        k0, _, _ = _refine(evaluate, *k_range, float(grid[j]), float(vals[j]), 0.0, width, opts)
        k = np.array([k0, 1.0 - k0])
        r = _closed_form_block(np.sqrt(p * k[:, None]).sum(axis=0), None)
        return float(np.sqrt(p * np.outer(k, r)).sum()), k, r, p.copy()

    if S == 2 and C == 2:
        k_range = _binary_range(k_box, S, "k")
        r_range = _binary_range(r_box, C, "r")
        value, k0, r0 = _binary_max_affinity(p, k_range, r_range, p_intervals, opts)
        masses = _BinaryAffinity(p, p_intervals).masses(k0, r0).reshape(S, C)
        return value, np.array([k0, 1.0 - k0]), np.array([r0, 1.0 - r0]), masses

    return _alternating_max_affinity(p, k_box, r_box, p_intervals, opts)


def min_feasible_rho(
    p: np.ndarray,
    k_box: Box = None,
    r_box: Box = None,
    p_intervals: Intervals = None,
    options: Optional[SolverOptions] = None,
) -> float:
    """Smallest rho for which a product-form Q within distance rho exists."""
    value = max_affinity(p, k_box, r_box, p_intervals, options)[0]
    return float(math.sqrt(max(0.0, 1.0 - min(value, 1.0))))


# =============================================================================
# Bilinear maximization
# =============================================================================

def _binary_bilinear(
    E: np.ndarray, p: np.ndarray, t: float, k_box: Box, r_box: Box, p_intervals: Intervals, opts: SolverOptions
) -> SolveReport:
    k_range = _binary_range(k_box, 2, "k")
    r_range = _binary_range(r_box, 2, "r")
    aff = _BinaryAffinity(p, p_intervals)
    steps = opts.bisection_steps

    def evaluate(k_values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        shape = k_values.shape
        r_lo = np.full(shape, r_range[0])
        r_hi = np.full(shape, r_range[1])
        g = lambda r: aff(k_values, r)  # noqa: E731
        peak, g_peak = _golden_peak(g, r_lo, r_hi)
        feasible = g_peak >= t
        # left end of the feasible r_0 interval
        a, b = r_lo.copy(), peak.copy()
        for _ in range(steps):
            mid = 0.5 * (a + b)
            ok = g(mid) >= t
            b = np.where(ok, mid, b)
            a = np.where(ok, a, mid)
        left = np.where(g(r_lo) >= t, r_lo, b)
        # right end
        a, b = peak.copy(), r_hi.copy()
        for _ in range(steps):
            mid = 0.5 * (a + b)
            ok = g(mid) >= t
            a = np.where(ok, mid, a)
            b = np.where(ok, b, mid)
        right = np.where(g(r_hi) >= t, r_hi, a)
        v_left = _outer_objective(E, k_values, left)
        v_right = _outer_objective(E, k_values, right)
        use_right = v_right > v_left
        values = np.where(feasible, np.where(use_right, v_right, v_left), -np.inf)
        return values, np.where(use_right, right, left)

    grid = _grid(*k_range, opts.scan_steps)
    vals, r_best = evaluate(grid)
    j = int(np.argmax(vals))
    width = (k_range[1] - k_range[0]) / opts.scan_steps
    center, value, r0 = float(grid[j]), float(vals[j]), float(r_best[j])

    if not np.isfinite(value):
        # feasible set may be thinner than the scan step; seed from the affinity peak
        best_aff, k_star, _ = _binary_max_affinity(p, k_range, r_range, p_intervals, opts)
        if best_aff < t:
            return SolveReport(status=SolveStatus.INFEASIBLE, violation=float(t - best_aff))
        vals, r_best = evaluate(np.array([k_star]))
        center, value, r0 = k_star, float(vals[0]), float(r_best[0])
        if not np.isfinite(value):
            return SolveReport(status=SolveStatus.INFEASIBLE, violation=float(max(t - best_aff, 0.0)))
    k0, value, r0 = _refine(evaluate, *k_range, center, value, r0, width, opts)

    k = np.array([k0, 1.0 - k0])
    r = np.array([r0, 1.0 - r0])
    masses = aff.masses(k0, r0)
    affinity = float(np.sqrt(masses * _BinaryAffinity.joint(k0, r0)).sum())
    x = np.concatenate([k, r, masses]) if p_intervals is not None else np.concatenate([k, r])
    return SolveReport(
        status=SolveStatus.OPTIMAL,
        x=x.tolist(),
        value=float(k @ E @ r),
        violation=max(0.0, t - affinity),
        iterations=opts.scan_steps + 1 + opts.polish_rounds * opts.polish_points,
        extras={"k": k.tolist(), "r": r.tolist(), "p": masses.reshape(2, 2).tolist(), "affinity": affinity},
    )


def _block_spec(
    coef: np.ndarray, P: np.ndarray, other: np.ndarray, t: float, by_row: bool,
    p_intervals: Intervals, box: Box,
) -> ProblemSpec:
    """One alternation block: maximize coef . v over v (and p), other block fixed."""
    S, C = P.shape
    n = S if by_row else C
    terms: List[Tuple[int, ...]] = []
    coefs: List[float] = []
    for s in range(S):
        for y in range(C):
            own = s if by_row else y
            fixed = other[y] if by_row else other[s]
            if p_intervals is None:
                coefs.append(float(np.sqrt(P[s, y] * fixed)))
                terms.append((own,))
            else:
                coefs.append(float(np.sqrt(fixed)))
                terms.append((own, n + s * C + y))
    lower = np.zeros(n) if box is None else np.asarray(box[0], dtype=float)
    upper = np.ones(n) if box is None else np.asarray(box[1], dtype=float)
    equalities = [LinearEquality(indices=list(range(n)), rhs=1.0)]
    if p_intervals is not None:
        lower = np.concatenate([lower, np.asarray(p_intervals[0], dtype=float).reshape(-1)])
        upper = np.concatenate([upper, np.asarray(p_intervals[1], dtype=float).reshape(-1)])
        equalities.append(LinearEquality(indices=list(range(n, n + S * C)), rhs=1.0))
    dim = lower.size
    grad = np.zeros(dim)
    grad[:n] = coef

    return ProblemSpec(
        dimension=dim,
        objective=lambda z: float(z[:n] @ coef),
        gradient=lambda z: grad.copy(),
        lower=lower,
        upper=upper,
        equalities=equalities,
        distance=DistanceConstraint(threshold=t, coefs=coefs, terms=terms),
    )


def _multistart_bilinear(
    E: np.ndarray, p: np.ndarray, t: float, k_box: Box, r_box: Box, p_intervals: Intervals, opts: SolverOptions
) -> SolveReport:
    S, C = p.shape
    if k_box is not None:
        _binary_range(k_box, S, "k")
    if r_box is not None:
        _binary_range(r_box, C, "r")
    aff_value, k_star, r_star, p_star = max_affinity(p, k_box, r_box, p_intervals, opts)
    if aff_value < t:
        return SolveReport(status=SolveStatus.INFEASIBLE, violation=float(t - aff_value), heuristic_global=True)

    starts = [(k_star, r_star)] + list(_starts(p, S, C, opts))[: max(opts.multistarts - 1, 0)]
    best_value, best = -np.inf, None
    iterations = 0
    for k, r in starts:
        P = p_star if p_intervals is not None else p
        value = -np.inf
        for _ in range(opts.alternation_rounds):
            k_report = maximize_concave(
                _block_spec(E @ r, P, r, t, True, p_intervals, k_box),
                np.concatenate([k, P.reshape(-1)]) if p_intervals is not None else k,
                opts,
            )
            iterations += k_report.iterations
            if not k_report.ok:
                break
            z = np.asarray(k_report.x)
            k = z[:S]
            if p_intervals is not None:
                P = z[S:].reshape(S, C)
            r_report = maximize_concave(
                _block_spec(E.T @ k, P, k, t, False, p_intervals, r_box),
                np.concatenate([r, P.reshape(-1)]) if p_intervals is not None else r,
                opts,
            )
            iterations += r_report.iterations
            if not r_report.ok:
                break
            z = np.asarray(r_report.x)
            r = z[:C]
            if p_intervals is not None:
                P = z[C:].reshape(S, C)
            new_value = float(k @ E @ r)
            if new_value - value < 1e-10:
                value = max(value, new_value)
                break
            value = new_value
        affinity = float(np.sqrt(P * np.outer(k, r)).sum())
        if np.isfinite(value) and affinity >= t - FEASIBILITY_SLACK and value > best_value:
            best_value, best = value, (k.copy(), r.copy(), P.copy(), affinity)

    if best is None:
        k, r, P = k_star, r_star, p_star
        best_value, best = float(k @ E @ r), (k, r, P, aff_value)
    k, r, P, affinity = best
    logger.debug("bilinear_multistart_done", starts=len(starts), value=best_value)
    x = np.concatenate([k, r] + ([P.reshape(-1)] if p_intervals is not None else []))
    return SolveReport(
        status=SolveStatus.OPTIMAL,
        x=x.tolist(),
        value=best_value,
        violation=max(0.0, t - affinity),
        iterations=iterations,
        heuristic_global=True,
        extras={"k": k.tolist(), "r": r.tolist(), "p": P.tolist(), "affinity": affinity},
    )


def maximize_bilinear_simplex(
    E: np.ndarray,
    p: np.ndarray,
    rho: float,
    k_box: Box = None,
    r_box: Box = None,
    p_intervals: Intervals = None,
    options: Optional[SolverOptions] = None,
) -> SolveReport:
    """
    Maximize sum k_s r_y E_{s,y} under the sensitive-shift distance constraint.

    Args:
        E: S x C loss matrix (upper estimates in finite-sampling mode)
        p: S x C training masses
        rho: Hellinger radius in (0, 1]
        k_box / r_box: optional (lower, upper) boxes on k and r
        p_intervals: optional (lower, upper) intervals making p a variable

    Returns:
        SolveReport with extras k, r, p. Binary-binary results are global;
        other shapes carry heuristic_global.
    """
    opts = options or SolverOptions()
    E = np.asarray(E, dtype=float)
    p = _check_inputs(E, p, p_intervals)
    if not 0.0 < rho <= 1.0:
        raise InvalidInputError(f"rho must lie in (0, 1], got {rho}")
    t = 1.0 - rho * rho
    if p.shape == (2, 2):
        return _binary_bilinear(E, p, t, k_box, r_box, p_intervals, opts)
    return _multistart_bilinear(E, p, t, k_box, r_box, p_intervals, opts)
