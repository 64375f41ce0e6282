"""
Closed-form upper bound on the mean of a [0, M]-valued loss under any
distribution within Hellinger distance rho, from its mean E and variance V.
"""
from __future__ import annotations

import math

from ...exceptions import InvalidInputError, OutsideRadiusError

DENOMINATOR_GUARD = 1e-12
RADIUS_SLACK = 1e-12


def _check_moments(E: float, V: float, M: float) -> None:
    if M <= 0 or not math.isfinite(M):
        raise InvalidInputError(f"loss bound M must be finite and positive, got {M}")
    if V < 0 or not math.isfinite(V):
        raise InvalidInputError(f"variance must be non-negative, got {V}")
    if E < 0 or E > M * (1.0 + 1e-12):
        raise InvalidInputError(f"mean {E} outside [0, M={M}]")


def gamma_bar_sq(E: float, V: float, M: float) -> float:
    """
    Applicability radius gamma_bar^2 = 1 - (1 + (M-E)^2 / V)^(-1/2).

    V = 0 gives 1 (limit), E = M with V > 0 gives 0.
    """
    _check_moments(E, V, M)
    if V == 0.0:
        return 1.0
    gap = max(M - E, 0.0)
    if gap == 0.0:
        return 0.0
    return min(max(1.0 - 1.0 / math.sqrt(1.0 + gap * gap / V), 0.0), 1.0)


def gramian_upper_bound(E: float, V: float, M: float, rho: float) -> float:
    """
    E + 2 C_rho sqrt(V) + rho^2 (2 - rho^2) C, clamped into [E, M], with
    C_rho = sqrt(rho^2 (1-rho^2)^2 (2-rho^2)) and C = M - E - V/(M-E).
    """
    _check_moments(E, V, M)
    if not 0.0 <= rho <= 1.0:
        raise InvalidInputError(f"rho must lie in [0, 1], got {rho}")
    if rho == 0.0:
        return float(E)
    rho_sq = rho * rho
    radius = gamma_bar_sq(E, V, M)
    if rho_sq > radius + RADIUS_SLACK:
        raise OutsideRadiusError(rho_sq, radius)
    gap = M - E
    if gap <= 0.0:
        return float(M)
    shift = gap if V == 0.0 else gap - V / max(gap, DENOMINATOR_GUARD)
    c_rho = math.sqrt(rho_sq * (1.0 - rho_sq) ** 2 * (2.0 - rho_sq))
    bound = E + 2.0 * c_rho * math.sqrt(V) + rho_sq * (2.0 - rho_sq) * shift
    return float(min(max(bound, E), M))
