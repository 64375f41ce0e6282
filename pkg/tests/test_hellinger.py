"""
Unit Tests for the Hellinger Slice core
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slices.exceptions import InvalidInputError
from slices.slice_hellinger.core import (
    compose_hellinger,
    fair_shift_joint,
    gaussian_shift_distances,
    hellinger_discrete,
    mass_vector,
    mixture_shift_distance,
    sensitive_shift_distance,
)

mass = st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=4, max_size=4).map(
    lambda w: np.asarray(w) / np.sum(w)
)


class TestDiscrete:
    """Tests for the discrete distance."""

    def test_identical_is_zero(self):
        """H(p, p) = 0."""
        p = [0.1, 0.2, 0.3, 0.4]
        assert hellinger_discrete(p, p) == pytest.approx(0.0, abs=1e-12)

    def test_disjoint_is_one(self):
        """Disjoint supports are at distance 1."""
        assert hellinger_discrete([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)

    def test_half_mass_moved(self):
        """(1, 0) against (0.5, 0.5) gives sqrt(1 - sqrt(0.5))."""
        expected = math.sqrt(1.0 - math.sqrt(0.5))
        assert hellinger_discrete([1.0, 0.0], [0.5, 0.5]) == pytest.approx(expected)
        assert expected == pytest.approx(0.541196, abs=1e-6)

    def test_length_mismatch(self):
        """Vectors must have the same length."""
        with pytest.raises(InvalidInputError):
            hellinger_discrete([0.5, 0.5], [1.0, 0.0, 0.0])

    def test_mass_must_sum_to_one(self):
        """Masses are validated."""
        with pytest.raises(InvalidInputError):
            mass_vector([0.5, 0.6])

    @settings(max_examples=50, deadline=None)
    @given(p=mass, q=mass)
    def test_symmetric_and_bounded(self, p, q):
        """0 <= H(p, q) = H(q, p) <= 1."""
        d = hellinger_discrete(p, q)
        assert 0.0 <= d <= 1.0
        assert d == pytest.approx(hellinger_discrete(q, p), abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(p=mass, q=mass)
    def test_sensitive_form_matches_discrete(self, p, q):
        """The affinity form equals the discrete distance."""
        assert sensitive_shift_distance(p, q) == pytest.approx(hellinger_discrete(p, q), abs=1e-9)


class TestComposition:
    """Tests for disjoint-component composition."""

    def test_matches_flattened_distance(self):
        """Composing per-component distances equals the distance on the union."""
        # components on two points each, disjoint across components
        p = np.array([0.6, 0.4])
        q = np.array([0.3, 0.7])
        P = [np.array([0.5, 0.5]), np.array([0.9, 0.1])]
        Q = [np.array([0.2, 0.8]), np.array([0.6, 0.4])]
        subs = [hellinger_discrete(a, b) for a, b in zip(P, Q)]
        flat_p = np.concatenate([p[0] * P[0], p[1] * P[1]])
        flat_q = np.concatenate([q[0] * Q[0], q[1] * Q[1]])
        assert compose_hellinger(p, q, subs) == pytest.approx(hellinger_discrete(flat_p, flat_q), abs=1e-12)

    def test_identical_components(self):
        """Zero sub-distances reduce to the mass-vector distance."""
        p, q = [0.25, 0.75], [0.5, 0.5]
        assert compose_hellinger(p, q, [0.0, 0.0]) == pytest.approx(hellinger_discrete(p, q))

    def test_sub_distance_range(self):
        """Sub-distances outside [0, 1] are rejected."""
        with pytest.raises(InvalidInputError):
            compose_hellinger([0.5, 0.5], [0.5, 0.5], [0.2, 1.5])


class TestShiftDistances:
    """Tests for the closed forms used by the simulator."""

    def test_mixture_without_shift(self):
        """alpha = 1 keeps the distribution."""
        assert mixture_shift_distance([0.25] * 4, [1.0] * 4) == pytest.approx(0.0, abs=1e-12)

    def test_mixture_fully_shifted(self):
        """alpha = 0 moves everything to the disjoint copy."""
        assert mixture_shift_distance([0.25] * 4, [0.0] * 4) == pytest.approx(1.0)

    def test_mixture_half(self):
        """alpha = 0.5 everywhere gives sqrt(1 - sqrt(0.5))."""
        assert mixture_shift_distance([0.1, 0.2, 0.3, 0.4], [0.5] * 4) == pytest.approx(
            math.sqrt(1.0 - math.sqrt(0.5))
        )

    def test_gaussian_closed_form(self):
        """|delta| = 2 gives W2 = 2 and H = sqrt(1 - e^-0.5)."""
        w2, h = gaussian_shift_distances(2.0)
        assert w2 == 2.0
        assert h == pytest.approx(math.sqrt(1.0 - math.exp(-0.5)))

    def test_gaussian_no_shift(self):
        """Zero shift is distance zero."""
        assert gaussian_shift_distances(0.0) == (0.0, 0.0)

    def test_gaussian_negative_norm(self):
        """Norms are non-negative."""
        with pytest.raises(InvalidInputError):
            gaussian_shift_distances(-1.0)

    def test_fair_joint_is_outer_product(self):
        """q = k r^T with unit mass."""
        q = fair_shift_joint([0.3, 0.7], [0.6, 0.4])
        assert np.allclose(q, [[0.18, 0.12], [0.42, 0.28]])
        assert q.sum() == pytest.approx(1.0)

    def test_corner_reweighting(self):
        """k = r = (1, 0) keeps only cell (0, 0): sqrt(1 - sqrt(p00))."""
        p = np.array([0.4, 0.1, 0.2, 0.3])
        q = fair_shift_joint([1.0, 0.0], [1.0, 0.0]).ravel()
        assert sensitive_shift_distance(p, q) == pytest.approx(math.sqrt(1.0 - math.sqrt(0.4)))
