"""
Sensitive-shifting fairness certificates.

The certificate is the maximum of sum_{s,y} k_s r_y E_{s,y} over fair
product-form reweightings q = k r^T of the training subpopulations within
Hellinger distance rho. It is attained by the returned (k, r), so the
bound is tight. The finite-sampling variant replaces E by its upper
confidence limits and lets p range over its intervals.
"""
from __future__ import annotations

from typing import Iterable, List, Optional

import numpy as np

from infrastructure.observability import get_logger, get_metrics, trace_operation

from ...exceptions import InvalidInputError
from ...slice_bounds.core import interval_table, union_confidence
from ...slice_solver.core import (
    SolverOptions,
    max_affinity,
    maximize_bilinear_simplex,
)
from ...slice_stats.core import StatsTable
from .types import Certificate, Scenario, SkewOptions

logger = get_logger(__name__)


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not 0.0 < rho <= 1.0:
        raise InvalidInputError(f"rho must lie in (0, 1], got {rho}")
    return rho


def _record(cert: Certificate, mode: str) -> Certificate:
    get_metrics().increment(
        "certificates_total",
        labels={"scenario": cert.scenario.value, "mode": mode, "feasible": str(cert.feasible).lower()},
    )
    logger.info(
        "certificate_computed",
        scenario=cert.scenario.value,
        mode=mode,
        rho=cert.rho,
        feasible=cert.feasible,
        value=cert.value,
    )
    return cert


def _solve(
    E: np.ndarray,
    p: np.ndarray,
    rho: float,
    skew: SkewOptions,
    p_intervals,
    confidence: float,
    options: Optional[SolverOptions],
    mode: str,
    extra: dict,
) -> Certificate:
    S, C = p.shape
    skew.check(S, C)
    k_box, r_box = skew.k_box(S), skew.r_box(C)
    report = maximize_bilinear_simplex(E, p, rho, k_box, r_box, p_intervals, options)
    affinity = max_affinity(p, k_box, r_box, p_intervals, options)[0]
    min_rho = float(np.sqrt(max(0.0, 1.0 - min(affinity, 1.0))))
    diagnostics = {"mode": mode, **report.summary(), **extra}

    if not report.ok:
        return _record(
            Certificate(
                scenario=Scenario.SENSITIVE, rho=rho, feasible=False, confidence=confidence,
                min_feasible_rho=min_rho, diagnostics=diagnostics,
            ),
            mode,
        )
    k = np.asarray(report.extras["k"], dtype=float)
    r = np.asarray(report.extras["r"], dtype=float)
    if p_intervals is not None:
        diagnostics["p"] = report.extras["p"]
    diagnostics["affinity"] = report.extras.get("affinity")
    return _record(
        Certificate(
            scenario=Scenario.SENSITIVE,
            rho=rho,
            feasible=True,
            value=float(k @ E @ r),
            k=k.tolist(),
            r=r.tolist(),
            confidence=confidence,
            min_feasible_rho=min_rho,
            diagnostics=diagnostics,
        ),
        mode,
    )


@trace_operation("certify_sensitive")
def certify_sensitive(
    stats: StatsTable,
    rho: float,
    skew: Optional[SkewOptions] = None,
    options: Optional[SolverOptions] = None,
) -> Certificate:
    """
    Exact-statistics certificate. Unbounded (BCE) losses are accepted.

    Infeasible radii return feasible=False with min_feasible_rho set.
    """
    rho = _check_rho(rho)
    return _solve(
        stats.E, stats.p, rho, skew or SkewOptions(), None, 1.0, options, "exact", {}
    )


@trace_operation("certify_sensitive_fs")
def certify_sensitive_fs(
    stats: StatsTable,
    rho: float,
    delta: float,
    skew: Optional[SkewOptions] = None,
    options: Optional[SolverOptions] = None,
) -> Certificate:
    """
    Finite-sampling certificate holding with probability 1 - 2SC delta.

    Uses the upper mean limits and optimizes p over its intervals.
    """
    rho = _check_rho(rho)
    intervals = interval_table(stats, delta)
    confidence = union_confidence(stats.S, stats.C, delta, 2)
    return _solve(
        intervals.E_hi,
        stats.p,
        rho,
        skew or SkewOptions(),
        (intervals.p_lo, intervals.p_hi),
        confidence,
        options,
        "finite_sampling",
        {"delta": delta},
    )


def certify_sweep(
    stats: StatsTable,
    rhos: Iterable[float],
    skew: Optional[SkewOptions] = None,
    delta: Optional[float] = None,
    options: Optional[SolverOptions] = None,
) -> List[Certificate]:
    """Certificates for each radius in ascending order; delta selects finite sampling."""
    ordered = sorted(_check_rho(r) for r in rhos)
    if delta is None:
        return [certify_sensitive(stats, r, skew, options) for r in ordered]
    return [certify_sensitive_fs(stats, r, delta, skew, options) for r in ordered]
