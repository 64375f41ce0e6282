"""
Problem and report types for the small constrained maximizer.

A problem maximizes a concave objective over a box intersected with
disjoint weighted-sum equalities, optionally subject to one distance
constraint  sum_i c_i sqrt(prod_{j in J_i} x_j) >= threshold.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ...exceptions import InvalidInputError
from .projection import project_box_equality

SQRT_FLOOR = 1e-14


class SolverOptions(BaseModel):
    """Iteration caps and tolerances."""
    outer_max: int = Field(default=200, ge=1)
    inner_max: int = Field(default=500, ge=1)
    stationarity_tol: float = 1e-6
    feasibility_tol: float = 1e-8
    sqrt_floor: float = SQRT_FLOOR
    penalty_init: float = 10.0
    penalty_max: float = 1e10
    scan_steps: int = Field(default=2000, ge=10)
    polish_rounds: int = Field(default=6, ge=0)
    polish_points: int = Field(default=41, ge=3)
    multistarts: int = Field(default=16, ge=1)
    alternation_rounds: int = Field(default=12, ge=1)
    bisection_steps: int = Field(default=60, ge=10)


class SolveStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    MAX_ITERATIONS = "MaxIterations"


class SolveReport(BaseModel):
    """Outcome of one solve."""
    status: SolveStatus
    x: List[float] = Field(default_factory=list)
    value: Optional[float] = None
    violation: float = 0.0
    iterations: int = 0
    stationarity: Optional[float] = None
    heuristic_global: bool = False
    extras: Dict[str, Any] = Field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is not SolveStatus.INFEASIBLE

    def summary(self) -> Dict[str, Any]:
        """Report without the argmax, for certificate diagnostics."""
        return {
            "status": self.status.value,
            "violation": self.violation,
            "iterations": self.iterations,
            "stationarity": self.stationarity,
            "heuristic_global": self.heuristic_global,
        }


@dataclass
class LinearEquality:
    """sum_{i in indices} w_i x_i = rhs with positive weights (default 1)."""
    indices: Sequence[int]
    rhs: float
    weights: Optional[Sequence[float]] = None

    def weight_array(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(len(self.indices))
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.indices),) or np.any(w <= 0):
            raise InvalidInputError("equality weights must be positive, one per index")
        return w


@dataclass
class DistanceConstraint:
    """sum_i coefs[i] * sqrt(prod x[terms[i]]) >= threshold."""
    threshold: float
    coefs: Sequence[float]
    terms: Sequence[Tuple[int, ...]]
    floor: float = SQRT_FLOOR
    _groups: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list, init=False)

    def __post_init__(self) -> None:
        if len(self.coefs) != len(self.terms):
            raise InvalidInputError("one coefficient per distance term is required")
        by_arity: Dict[int, List[int]] = {}
        for i, term in enumerate(self.terms):
            if not term:
                raise InvalidInputError("distance terms need at least one index")
            by_arity.setdefault(len(term), []).append(i)
        coefs = np.asarray(self.coefs, dtype=float)
        if np.any(coefs < 0):
            raise InvalidInputError("distance coefficients must be non-negative")
        self._groups = [
            (coefs[members], np.array([self.terms[i] for i in members], dtype=np.int64))
            for _, members in sorted(by_arity.items())
        ]

    def max_index(self) -> int:
        return max(max(t) for t in self.terms)

    def affinity(self, x: np.ndarray) -> float:
        total = 0.0
        for coefs, idx in self._groups:
            total += float(np.dot(coefs, np.sqrt(np.maximum(np.prod(x[idx], axis=1), 0.0))))
        return total

    def gradient(self, x: np.ndarray) -> np.ndarray:
        grad = np.zeros_like(x)
        for coefs, idx in self._groups:
            values = np.maximum(x[idx], 0.0)
            for j in range(idx.shape[1]):
                others = np.prod(np.delete(values, j, axis=1), axis=1)
                own = np.sqrt(np.maximum(values[:, j], self.floor))
                np.add.at(grad, idx[:, j], coefs * np.sqrt(others) / (2.0 * own))
        return grad

    def violation(self, x: np.ndarray) -> float:
        return max(0.0, self.threshold - self.affinity(x))


@dataclass
class ProblemSpec:
    """Concave maximization over box intersected with equalities."""
    dimension: int
    objective: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    lower: np.ndarray
    upper: np.ndarray
    equalities: List[LinearEquality] = field(default_factory=list)
    distance: Optional[DistanceConstraint] = None

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise InvalidInputError("dimension must be at least 1")
        self.lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dimension,)).copy()
        self.upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dimension,)).copy()
        if np.any(self.lower > self.upper):
            raise InvalidInputError("box bounds must satisfy lower <= upper")
        seen = set()
        self._groups = []
        for eq in self.equalities:
            idx = np.asarray(eq.indices, dtype=np.int64)
            if idx.size == 0 or np.any((idx < 0) | (idx >= self.dimension)):
                raise InvalidInputError("equality indices out of range")
            if seen.intersection(idx.tolist()):
                raise InvalidInputError("equality index groups must be disjoint")
            seen.update(idx.tolist())
            w = eq.weight_array()
            if (
                float(w @ self.lower[idx]) > eq.rhs + 1e-12
                or float(w @ self.upper[idx]) < eq.rhs - 1e-12
            ):
                raise InvalidInputError("equality cannot be met inside the box")
            self._groups.append((idx, w, float(eq.rhs)))
        if self.distance is not None and self.distance.max_index() >= self.dimension:
            raise InvalidInputError("distance term index out of range")

    def project(self, v: np.ndarray) -> np.ndarray:
        return project_box_equality(v, self.lower, self.upper, self._groups)

    def midpoint(self) -> np.ndarray:
        return self.project(0.5 * (self.lower + self.upper))
