"""
Fair-distribution generation protocols for binary sensitive attribute and
binary label.

Sensitive shifting reweights the training subpopulations to product-form
masses q = k r^T. General shifting mixes each subpopulation with a
support-disjoint copy of itself, with mixing weights chosen so that the
resulting masses keep base-rate parity. Both protocols size the sample
by the binding subpopulation (the one needing the most samples uses all
of them) and subsample without replacement.
"""
from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from infrastructure.observability import get_logger

from ...exceptions import InvalidInputError, SolverFailure
from ...slice_hellinger.core import mixture_shift_distance, sensitive_shift_distance
from ...slice_stats.core import LossKind, SampleBatch
from ...slice_stats.core.aggregate import sample_losses
from .types import MASS_TOLERANCE, MAX_REJECTIONS, ShiftTrial

logger = get_logger(__name__)

S_BINARY = 2
C_BINARY = 2


def trial_seed(seed: int, index: int) -> int:
    """Per-trial seed from a (run seed, trial index) counter."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def _cells(batch: SampleBatch) -> List[np.ndarray]:
    batch.check_keys(S_BINARY, C_BINARY)
    cells = [np.flatnonzero((batch.s == s) & (batch.y == y)) for s in range(S_BINARY) for y in range(C_BINARY)]
    for i, members in enumerate(cells):
        if members.size == 0:
            raise InvalidInputError(f"subpopulation (s={i // 2}, y={i % 2}) is empty")
    return cells


def _empirical_masses(cells: Sequence[np.ndarray]) -> np.ndarray:
    counts = np.array([c.size for c in cells], dtype=float)
    return counts / counts.sum()


def _binding_sizes(weights: np.ndarray, available: np.ndarray) -> np.ndarray:
    """Sizes proportional to weights with the binding cell fully used."""
    positive = weights > 0
    total = float(np.min(available[positive] / weights[positive]))
    sizes = np.where(positive, np.rint(weights * total), 0).astype(np.int64)
    return np.minimum(sizes, available.astype(np.int64))


def _subsample(rng: np.random.Generator, members: np.ndarray, size: int) -> np.ndarray:
    if size <= 0:
        return members[:0]
    return rng.choice(members, size=int(size), replace=False)


def _as_probability(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InvalidInputError(f"{name} must lie in [0, 1], got {value}")
    return value


# =============================================================================
# Sensitive shifting
# =============================================================================

def sensitive_trial(
    samples: SampleBatch,
    k: float,
    r: float,
    rng: np.random.Generator,
    kind: LossKind = LossKind.ZERO_ONE,
    seed: int = 0,
) -> ShiftTrial:
    """One trial with q = (k r, k (1-r), (1-k) r, (1-k)(1-r))."""
    k, r = _as_probability("k", k), _as_probability("r", r)
    cells = _cells(samples)
    losses = sample_losses(samples, LossKind(kind))
    p = _empirical_masses(cells)
    q = np.array([k * r, k * (1.0 - r), (1.0 - k) * r, (1.0 - k) * (1.0 - r)])
    sizes = _binding_sizes(q, np.array([c.size for c in cells], dtype=float))
    drawn = np.concatenate([_subsample(rng, members, size) for members, size in zip(cells, sizes)])
    if drawn.size == 0:
        raise SolverFailure("trial drew no samples")
    return ShiftTrial(
        distance=sensitive_shift_distance(p, q),
        loss=float(losses[drawn].mean()),
        q=q.tolist(),
        seed=int(seed),
        size=int(drawn.size),
    )


def gen_sensitive_trials(
    samples: SampleBatch,
    n_trials: int,
    seed: int,
    kind: LossKind = LossKind.ZERO_ONE,
) -> List[ShiftTrial]:
    """k and r drawn independently and uniformly on [0, 1] per trial."""
    if n_trials < 0:
        raise InvalidInputError(f"n_trials must be non-negative, got {n_trials}")
    trials = []
    for i in range(n_trials):
        child = trial_seed(seed, i)
        rng = np.random.default_rng(child)
        k, r = rng.uniform(0.0, 1.0, size=2)
        trials.append(sensitive_trial(samples, k, r, rng, kind, seed=child))
    logger.debug("sensitive_trials_generated", trials=n_trials, seed=seed)
    return trials


# =============================================================================
# General shifting
# =============================================================================

def mixture_masses(p: np.ndarray, alpha: np.ndarray, alpha_prime: np.ndarray) -> np.ndarray:
    """Subpopulation masses alpha p + alpha' q' with q' = p."""
    return (np.asarray(alpha, dtype=float) + np.asarray(alpha_prime, dtype=float)) * p


def sample_mixing(p: np.ndarray, rng: np.random.Generator, max_rejections: int = MAX_REJECTIONS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw (alpha, alpha') in [0,1]^4 x [0,1]^4 with unit total mass and
    base-rate parity u00 / u01 = u10 / u11.

    Six parameters are uniform; alpha'_10 and alpha'_11 are solved from the
    two equalities and the draw is rejected when they leave [0, 1].
    """
    p = np.asarray(p, dtype=float)
    for _ in range(max_rejections):
        alpha = rng.uniform(0.0, 1.0, size=4)
        head = rng.uniform(0.0, 1.0, size=2)
        u00 = (alpha[0] + head[0]) * p[0]
        u01 = (alpha[1] + head[1]) * p[1]
        rest = 1.0 - u00 - u01
        if u01 <= 0.0 or rest < 0.0:
            continue
        ratio = u00 / u01
        u11 = rest / (1.0 + ratio)
        u10 = ratio * u11
        tail = np.array([u10 / p[2] - alpha[2], u11 / p[3] - alpha[3]])
        if np.all((tail >= 0.0) & (tail <= 1.0)):
            return alpha, np.concatenate([head, tail])
    raise SolverFailure(f"no admissible mixing parameters after {max_rejections} draws")


def _check_mixing(p: np.ndarray, alpha: np.ndarray, alpha_prime: np.ndarray) -> np.ndarray:
    for name, vec in (("alpha", alpha), ("alpha_prime", alpha_prime)):
        if vec.shape != (4,) or np.any((vec < 0.0) | (vec > 1.0)):
            raise InvalidInputError(f"{name} must hold four values in [0, 1]")
    u = mixture_masses(p, alpha, alpha_prime)
    if abs(float(u.sum()) - 1.0) > MASS_TOLERANCE:
        raise InvalidInputError(f"mixed masses must sum to 1, got {u.sum():.12g}")
    if abs(u[0] * u[3] - u[1] * u[2]) > MASS_TOLERANCE:
        raise InvalidInputError("mixed masses violate base-rate parity")
    return u


def general_trial(
    samples: SampleBatch,
    alpha: Sequence[float],
    alpha_prime: Sequence[float],
    rng: np.random.Generator,
    kind: LossKind = LossKind.ZERO_ONE,
    seed: int = 0,
) -> ShiftTrial:
    """One trial mixing each subpopulation with its shifted copy."""
    if samples.shifted_loss is None:
        raise InvalidInputError("general shifting needs losses on the shifted copies (shifted_loss)")
    cells = _cells(samples)
    losses = sample_losses(samples, LossKind(kind))
    p = _empirical_masses(cells)
    alpha = np.asarray(alpha, dtype=float)
    alpha_prime = np.asarray(alpha_prime, dtype=float)
    u = _check_mixing(p, alpha, alpha_prime)

    available = np.array([c.size for c in cells], dtype=float)
    weights = np.concatenate([alpha * p, alpha_prime * p])
    sizes = _binding_sizes(weights, np.concatenate([available, available]))
    picked: List[np.ndarray] = []
    for i, members in enumerate(cells):
        original = _subsample(rng, members, sizes[i])
        shifted = _subsample(rng, members, sizes[4 + i])
        picked.append(losses[original])
        picked.append(samples.shifted_loss[shifted])
    values = np.concatenate(picked)
    if values.size == 0:
        raise SolverFailure("trial drew no samples")
    return ShiftTrial(
        distance=mixture_shift_distance(p, alpha),
        loss=float(values.mean()),
        q=(u / u.sum()).tolist(),
        alpha=alpha.tolist(),
        alpha_prime=alpha_prime.tolist(),
        seed=int(seed),
        size=int(values.size),
    )


def gen_general_trials(
    samples: SampleBatch,
    n_trials: int,
    seed: int,
    kind: LossKind = LossKind.ZERO_ONE,
    max_rejections: int = MAX_REJECTIONS,
) -> List[ShiftTrial]:
    """Seeded general-shifting trials; the shifted copies come with the samples."""
    if n_trials < 0:
        raise InvalidInputError(f"n_trials must be non-negative, got {n_trials}")
    p = _empirical_masses(_cells(samples))
    trials = []
    for i in range(n_trials):
        child = trial_seed(seed, i)
        rng = np.random.default_rng(child)
        alpha, alpha_prime = sample_mixing(p, rng, max_rejections)
        trials.append(general_trial(samples, alpha, alpha_prime, rng, kind, seed=child))
    logger.debug("general_trials_generated", trials=n_trials, seed=seed)
    return trials


def replay_sensitive(samples: SampleBatch, k: Sequence[float], r: Sequence[float], seed: int,
                     kind: LossKind = LossKind.ZERO_ONE) -> ShiftTrial:
    """Trial at a certifier's optimizer (k, r) vectors."""
    return sensitive_trial(samples, k[0], r[0], np.random.default_rng(seed), kind, seed=seed)
