"""
Unit Tests for the Solver Slice core
"""

import math

import numpy as np
import pytest

from slices.exceptions import InvalidInputError
from slices.slice_solver.core import (
    DistanceConstraint,
    LinearEquality,
    ProblemSpec,
    SolverOptions,
    SolveStatus,
    max_affinity,
    max_sqrt_affinity,
    maximize_bilinear_simplex,
    maximize_concave,
    maximize_separable_sqrt,
    min_feasible_rho,
    project_box_equality,
    separable_objective,
)

UNIFORM_P = np.full((2, 2), 0.25)
DIAGONAL_P = np.array([[0.9, 0.0], [0.0, 0.1]])
E_MATRIX = np.array([[0.1, 0.2], [0.3, 0.4]])


class TestProjection:
    """Tests for box-and-equality projection."""

    def test_simplex_projection(self):
        """Projection onto the probability simplex."""
        x = project_box_equality(
            np.array([0.8, 0.6, -0.2]), np.zeros(3), np.ones(3), [(np.arange(3), np.ones(3), 1.0)]
        )
        assert x.sum() == pytest.approx(1.0)
        assert np.allclose(x, [0.6, 0.4, 0.0])

    def test_water_filling(self):
        """sum sqrt(a p) is maximized by p proportional to a inside the box."""
        a = np.array([0.1, 0.3, 0.6])
        values, p = max_sqrt_affinity(a, np.zeros(3), np.ones(3))
        assert np.allclose(p, a)
        assert float(values) == pytest.approx(1.0)

    def test_water_filling_respects_box(self):
        """Capped entries push mass elsewhere."""
        a = np.array([0.1, 0.3, 0.6])
        _, p = max_sqrt_affinity(a, np.zeros(3), np.array([1.0, 1.0, 0.4]))
        assert p[2] == pytest.approx(0.4)
        assert p.sum() == pytest.approx(1.0)
        assert p[1] / p[0] == pytest.approx(3.0)


class TestConcaveMaximizer:
    """Tests for the augmented-Lagrangian maximizer."""

    def test_linear_objective_on_simplex(self):
        """Maximizing sum x over the simplex returns 1."""
        spec = ProblemSpec(
            dimension=3,
            objective=lambda x: float(x.sum()),
            gradient=lambda x: np.ones_like(x),
            lower=0.0,
            upper=1.0,
            equalities=[LinearEquality(indices=[0, 1, 2], rhs=1.0)],
        )
        report = maximize_concave(spec)
        assert report.ok
        assert report.value == pytest.approx(1.0)

    def test_binary_entropy_like_peak(self):
        """2 sqrt(x (1 - x)) peaks at 1 for x = 0.5."""
        def f(x):
            return float(2.0 * np.sqrt(max(x[0] * (1.0 - x[0]), 0.0)))

        def g(x):
            xc = min(max(x[0], 1e-12), 1.0 - 1e-12)
            return np.array([(1.0 - 2.0 * xc) / math.sqrt(xc * (1.0 - xc))])

        spec = ProblemSpec(dimension=1, objective=f, gradient=g, lower=0.01, upper=0.99)
        report = maximize_concave(spec, start=np.array([0.1]))
        assert report.value == pytest.approx(1.0, abs=1e-6)
        assert report.x[0] == pytest.approx(0.5, abs=1e-3)

    def test_stalled_search_is_not_optimal(self):
        """Stopping short of the stationarity tolerance is reported as such."""
        # the gradient disagrees with the flat objective, so no step is accepted
        spec = ProblemSpec(
            dimension=1,
            objective=lambda x: 0.0,
            gradient=lambda x: np.ones(1),
            lower=0.0,
            upper=1.0,
        )
        report = maximize_concave(spec, start=np.array([0.5]))
        assert report.status is SolveStatus.MAX_ITERATIONS
        assert report.iterations < SolverOptions().inner_max
        assert report.stationarity == pytest.approx(0.5)
        assert report.ok

    def test_distance_constraint_binds(self):
        """max -x0 subject to sqrt(x0) >= 0.5 gives x0 = 0.25."""
        spec = ProblemSpec(
            dimension=1,
            objective=lambda x: -float(x[0]),
            gradient=lambda x: -np.ones(1),
            lower=0.0,
            upper=1.0,
            distance=DistanceConstraint(threshold=0.5, coefs=[1.0], terms=[(0,)]),
        )
        report = maximize_concave(spec, start=np.array([0.9]))
        assert report.ok
        assert report.x[0] == pytest.approx(0.25, abs=1e-5)
        assert report.violation <= 1e-8

    def test_infeasible_distance(self):
        """An unreachable threshold is reported, not raised."""
        spec = ProblemSpec(
            dimension=1,
            objective=lambda x: float(x[0]),
            gradient=lambda x: np.ones(1),
            lower=0.0,
            upper=0.25,
            distance=DistanceConstraint(threshold=0.9, coefs=[1.0], terms=[(0,)]),
        )
        report = maximize_concave(spec)
        assert report.status is SolveStatus.INFEASIBLE
        assert not report.ok

    def test_equality_outside_box(self):
        """Equalities the box cannot meet are input errors."""
        with pytest.raises(InvalidInputError):
            ProblemSpec(
                dimension=2,
                objective=lambda x: 0.0,
                gradient=lambda x: np.zeros(2),
                lower=0.0,
                upper=0.3,
                equalities=[LinearEquality(indices=[0, 1], rhs=1.0)],
            )


class TestBilinear:
    """Tests for the sensitive-shift bilinear maximizer."""

    def test_uniform_masses(self, fast_solver):
        """Uniform p, rho = 0.8: all weight on cell (1, 1) gives 0.4."""
        report = maximize_bilinear_simplex(E_MATRIX, UNIFORM_P, 0.8, options=fast_solver)
        assert report.ok
        assert report.value == pytest.approx(0.4, abs=1e-9)
        assert report.extras["k"] == pytest.approx([0.0, 1.0], abs=1e-9)
        assert report.extras["r"] == pytest.approx([0.0, 1.0], abs=1e-9)
        assert not report.heuristic_global

    def test_argmax_is_feasible(self, fast_solver):
        """Returned (k, r) meet the distance constraint."""
        rho = 0.3
        report = maximize_bilinear_simplex(E_MATRIX, UNIFORM_P, rho, options=fast_solver)
        k, r = np.array(report.extras["k"]), np.array(report.extras["r"])
        affinity = float(np.sqrt(UNIFORM_P * np.outer(k, r)).sum())
        assert affinity >= 1.0 - rho * rho - 1e-9
        assert report.value == pytest.approx(float(k @ E_MATRIX @ r))

    def test_value_grows_with_radius(self, fast_solver):
        """Larger radii never lower the maximum."""
        values = [
            maximize_bilinear_simplex(E_MATRIX, UNIFORM_P, rho, options=fast_solver).value
            for rho in (0.1, 0.2, 0.4, 0.6)
        ]
        assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))

    def test_diagonal_masses_infeasible_at_small_radius(self, fast_solver):
        """No product-form q is within 0.1 of a diagonal p."""
        report = maximize_bilinear_simplex(E_MATRIX, DIAGONAL_P, 0.1, options=fast_solver)
        assert report.status is SolveStatus.INFEASIBLE

    def test_diagonal_min_feasible_rho(self, fast_solver):
        """Closest product form is k = r = (1, 0): sqrt(1 - sqrt(0.9))."""
        rho = min_feasible_rho(DIAGONAL_P, options=fast_solver)
        assert 0.2255 <= rho <= 0.2275
        assert rho == pytest.approx(math.sqrt(1.0 - math.sqrt(0.9)), abs=1e-6)

    def test_max_affinity_of_product_is_one(self, fast_solver):
        """A product-form p is its own closest fair distribution."""
        p = np.outer([0.3, 0.7], [0.6, 0.4])
        value, k, r, _ = max_affinity(p, options=fast_solver)
        assert value == pytest.approx(1.0, abs=1e-9)
        assert k == pytest.approx([0.3, 0.7], abs=1e-4)

    def test_boxed_k(self, fast_solver):
        """A point box on k fixes it."""
        box = (np.array([0.5, 0.5]), np.array([0.5, 0.5]))
        report = maximize_bilinear_simplex(E_MATRIX, UNIFORM_P, 0.8, k_box=box, options=fast_solver)
        assert report.extras["k"] == pytest.approx([0.5, 0.5])
        assert report.value == pytest.approx(0.3, abs=1e-9)

    def test_non_binary_is_flagged(self, fast_solver):
        """Shapes other than 2 x 2 are heuristic."""
        p = np.full((3, 2), 1.0 / 6.0)
        E = np.array([[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]])
        report = maximize_bilinear_simplex(E, p, 0.9, options=fast_solver)
        assert report.ok
        assert report.heuristic_global
        assert report.value == pytest.approx(0.6, abs=1e-4)

    def test_rho_range(self):
        """rho must lie in (0, 1]."""
        with pytest.raises(InvalidInputError):
            maximize_bilinear_simplex(E_MATRIX, UNIFORM_P, 0.0)


class TestSeparable:
    """Tests for the batched separable cell solver."""

    def _problem(self):
        const = np.array([[0.1, 0.2, 0.0, 0.1]])
        alpha = np.array([[0.3, 0.2, 0.4, 0.1]])
        beta = np.array([[0.5, 0.1, 0.3, 0.2]])
        weights = np.array([[0.5, 0.5, 0.4, 0.6]])
        lower = np.array([[0.2, 0.1, 0.3, 0.0]])
        return const, alpha, beta, weights, lower

    def test_matches_concave_maximizer(self):
        """The one-multiplier solve agrees with the general maximizer."""
        const, alpha, beta, weights, lower = self._problem()
        threshold = 1.6
        result = maximize_separable_sqrt(const, alpha, beta, weights, lower, np.ones_like(lower), threshold)
        assert result.feasible[0]

        def f(x):
            return float(separable_objective(const[0], alpha[0], beta[0], x))

        def g(x):
            xc = np.clip(x, 1e-12, 1.0 - 1e-12)
            return alpha[0] * (1.0 - 2.0 * xc) / np.sqrt(xc * (1.0 - xc)) - beta[0]

        spec = ProblemSpec(
            dimension=4,
            objective=f,
            gradient=g,
            lower=lower[0],
            upper=np.ones(4),
            distance=DistanceConstraint(threshold=threshold, coefs=weights[0].tolist(), terms=[(i,) for i in range(4)]),
        )
        report = maximize_concave(spec, start=np.full(4, 0.9))
        assert result.values[0] == pytest.approx(report.value, abs=1e-4)

    def test_solution_is_feasible(self):
        """Returned x meets the constraint."""
        const, alpha, beta, weights, lower = self._problem()
        threshold = 1.8
        result = maximize_separable_sqrt(const, alpha, beta, weights, lower, np.ones_like(lower), threshold)
        assert float(np.sum(weights * np.sqrt(result.x))) >= threshold - 1e-12

    def test_infeasible_rows(self):
        """Rows that cannot reach the threshold get NaN."""
        const, alpha, beta, weights, lower = self._problem()
        result = maximize_separable_sqrt(const, alpha, beta, weights, lower, np.ones_like(lower), 2.5)
        assert not result.feasible[0]
        assert np.isnan(result.values[0])

    def test_batch_rows_are_independent(self):
        """A batch solves each row as if alone."""
        const, alpha, beta, weights, lower = self._problem()
        stacked = [np.vstack([v, v]) for v in (const, alpha, beta, weights, lower)]
        both = maximize_separable_sqrt(*stacked, np.ones((2, 4)), np.array([1.2, 1.9]))
        first = maximize_separable_sqrt(const, alpha, beta, weights, lower, np.ones_like(lower), 1.2)
        assert both.values[0] == pytest.approx(first.values[0])
        assert len(both) == 2
