"""
Hellinger distances on discrete distributions and the closed forms used by
the shift simulator.

All radicands are clamped into [0, 1] before the square root: sums of
sqrt(p q) can exceed 1 by rounding on identical inputs.
"""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from ...exceptions import InvalidInputError

MASS_TOLERANCE = 1e-9


def mass_vector(weights, name: str = "mass vector") -> np.ndarray:
    """Validate and flatten a probability mass vector."""
    vec = np.asarray(weights, dtype=float).ravel()
    if vec.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(vec)) or np.any(vec < 0.0):
        raise InvalidInputError(f"{name} has negative or non-finite weights")
    if abs(float(vec.sum()) - 1.0) > MASS_TOLERANCE:
        raise InvalidInputError(f"{name} sums to {vec.sum():.12g}, expected 1")
    return vec


def _pair(p, q) -> Tuple[np.ndarray, np.ndarray]:
    p_vec, q_vec = mass_vector(p, "p"), mass_vector(q, "q")
    if p_vec.shape != q_vec.shape:
        raise InvalidInputError(f"length mismatch: {p_vec.size} vs {q_vec.size}")
    return p_vec, q_vec


def _from_affinity(affinity: float) -> float:
    return math.sqrt(min(max(1.0 - affinity, 0.0), 1.0))


def hellinger_discrete(p, q) -> float:
    """H = sqrt(1/2 sum (sqrt p_i - sqrt q_i)^2)."""
    p_vec, q_vec = _pair(p, q)
    diff = np.sqrt(p_vec) - np.sqrt(q_vec)
    return math.sqrt(min(max(0.5 * float(np.dot(diff, diff)), 0.0), 1.0))


def compose_hellinger(p, q, sub_distances) -> float:
    """
    Distance of two mixtures sum p_i P_i and sum q_i Q_i whose components
    are pairwise disjoint, given H(P_i, Q_i) for every component.
    """
    p_vec, q_vec = _pair(p, q)
    h = np.asarray(sub_distances, dtype=float).ravel()
    if h.shape != p_vec.shape:
        raise InvalidInputError("one sub-distance per component is required")
    if not np.all(np.isfinite(h)) or np.any((h < 0.0) | (h > 1.0)):
        raise InvalidInputError("sub-distances must lie in [0, 1]")
    return _from_affinity(float(np.sum(np.sqrt(p_vec * q_vec) * (1.0 - h * h))))


def sensitive_shift_distance(p, q) -> float:
    """Distance when only (s, y) proportions move: sqrt(1 - sum sqrt(p q))."""
    p_vec, q_vec = _pair(p, q)
    return _from_affinity(float(np.sum(np.sqrt(p_vec * q_vec))))


def mixture_shift_distance(p, alpha) -> float:
    """
    Distance of Q = sum (alpha p P_cell + disjoint rest) from P:
    sqrt(1 - sum sqrt(alpha) p).
    """
    p_vec = mass_vector(p, "p")
    a = np.asarray(alpha, dtype=float).ravel()
    if a.shape != p_vec.shape:
        raise InvalidInputError(f"length mismatch: {p_vec.size} vs {a.size}")
    if not np.all(np.isfinite(a)) or np.any((a < 0.0) | (a > 1.0)):
        raise InvalidInputError("alpha entries must lie in [0, 1]")
    return _from_affinity(float(np.sum(np.sqrt(a) * p_vec)))


def gaussian_shift_distances(delta_norm: float) -> Tuple[float, float]:
    """
    (W2, H) between N(mu, s^2 I) and N(mu + delta, s^2 I) with unit scale:
    W2 = |delta|, H = sqrt(1 - exp(-|delta|^2 / 8)).
    """
    if not math.isfinite(delta_norm) or delta_norm < 0:
        raise InvalidInputError(f"shift norm must be non-negative, got {delta_norm}")
    return float(delta_norm), math.sqrt(-math.expm1(-delta_norm * delta_norm / 8.0))


def fair_shift_joint(k, r) -> np.ndarray:
    """q_{s,y} = k_s r_y as an S x C matrix."""
    k_vec, r_vec = mass_vector(k, "k"), mass_vector(r, "r")
    return np.outer(k_vec, r_vec)
