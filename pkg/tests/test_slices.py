"""
Unit Tests for the slice facades
"""

import math

import pytest

from slices.slice_base import SliceConfig, SliceRequest, SliceResponse
from slices.slice_bounds import SliceBounds
from slices.slice_fairgen import SliceFairgen
from slices.slice_general import SliceGeneral
from slices.slice_hellinger import SliceHellinger
from slices.slice_sensitive import SliceSensitive
from slices.slice_solver import SliceSolver
from slices.slice_stats import SliceStats


def _records():
    rows = []
    for s in (0, 1):
        for y in (0, 1):
            for loss in (0.0, 1.0, 1.0 if s else 0.0):
                rows.append({"key": {"s": s, "y": y}, "loss": loss})
    return rows


class TestSliceBase:
    """Tests for slice_base module."""

    def test_slice_config_creation(self):
        """Test SliceConfig creation."""
        config = SliceConfig(slice_id="test_slice")
        assert config.slice_id == "test_slice"

    def test_slice_request_creation(self):
        """Test SliceRequest creation."""
        request = SliceRequest(request_id="req-123", operation="test", payload={"key": "value"})
        assert request.request_id == "req-123"
        assert request.payload["key"] == "value"

    def test_slice_response_creation(self):
        """Test SliceResponse creation."""
        response = SliceResponse(request_id="req-123", success=True, payload={"result": "ok"})
        assert response.success is True
        assert response.payload["result"] == "ok"

    async def test_unknown_operation(self):
        """Unknown operations fail without raising."""
        response = await SliceStats().execute(operation="nosuch")
        assert not response.success
        assert response.payload == {"error": "Unknown operation: nosuch"}

    async def test_errors_carry_type(self):
        """Handler exceptions become error responses."""
        response = await SliceHellinger().execute(
            operation="hellinger_discrete", payload={"p": [0.5, 0.5], "q": [1.0, 0.0, 0.0]}
        )
        assert not response.success
        assert response.payload["error_type"] == "InvalidInputError"
        assert response.error_message

    async def test_request_object(self):
        """execute also takes a SliceRequest."""
        request = SliceRequest(request_id="r-1", operation="base_rates", payload={"q": [[0.2, 0.2], [0.3, 0.3]]})
        response = await SliceStats().execute(request)
        assert response.request_id == "r-1"
        assert response.success

    async def test_health_and_capabilities(self):
        """Slices report health and their operations."""
        slice_ = SliceBounds()
        await slice_.initialize()
        health = await slice_.health_check()
        caps = await slice_.get_capabilities()
        assert health["status"] == "healthy"
        assert "gramian_upper_bound" in caps.supported_operations


class TestSliceStats:
    """Tests for the Stats Slice facade."""

    async def test_compute_loss(self):
        response = await SliceStats().execute(
            operation="compute_loss", payload={"prediction": [0.2, 0.8], "label": 0, "kind": "zeroone"}
        )
        assert response.payload["loss"] == 1.0

    async def test_aggregate_and_bound(self):
        """Records aggregate to a table that accepts an M override."""
        stats = SliceStats()
        response = await stats.execute(
            operation="aggregate_stats", payload={"samples": _records(), "S": 2, "C": 2, "kind": "zeroone"}
        )
        assert response.success
        table = response.payload["table"]
        assert len(table["cells"]) == 4
        bounded = await stats.execute(operation="with_loss_bound", payload={"table": table, "M": 2.0})
        assert bounded.payload["table"]["M"] == 2.0

    async def test_fairness_checks(self):
        stats = SliceStats()
        fair = await stats.execute(operation="is_fair_base_rate", payload={"q": [[0.18, 0.12], [0.42, 0.28]]})
        assert fair.payload["fair"]
        gap = await stats.execute(operation="dp_gap", payload={"samples": [], "S": 2, "C": 2})
        assert not gap.success


class TestSliceHellinger:
    """Tests for the Hellinger Slice facade."""

    async def test_gaussian_distances(self):
        response = await SliceHellinger().execute(operation="gaussian_shift_distances", payload={"delta_norm": 2.0})
        assert response.payload["wasserstein"] == 2.0
        assert response.payload["hellinger"] == pytest.approx(math.sqrt(1.0 - math.exp(-0.5)))

    async def test_fair_joint(self):
        response = await SliceHellinger().execute(operation="fair_shift_joint", payload={"k": [0.5, 0.5], "r": [1.0, 0.0]})
        assert response.payload["q"] == [[0.5, 0.0], [0.5, 0.0]]


class TestSliceBounds:
    """Tests for the Bounds Slice facade."""

    async def test_mean_interval(self):
        response = await SliceBounds().execute(
            operation="mean_interval", payload={"mean_hat": 0.5, "n": 100, "M": 1.0, "delta": 0.1}
        )
        assert response.payload["lo"] < 0.5 < response.payload["hi"]

    async def test_gramian_outside_radius(self):
        """Radius errors keep their own type."""
        response = await SliceBounds().execute(
            operation="gramian_upper_bound", payload={"E": 0.5, "V": 0.2, "M": 1.0, "rho": 0.99}
        )
        assert not response.success
        assert response.payload["error_type"] == "OutsideRadiusError"


class TestSliceSolver:
    """Tests for the Solver Slice facade."""

    async def test_min_feasible_rho(self):
        response = await SliceSolver().execute(
            operation="min_feasible_rho", payload={"p": [[0.9, 0.0], [0.0, 0.1]]}
        )
        assert response.payload["min_feasible_rho"] == pytest.approx(math.sqrt(1.0 - math.sqrt(0.9)), abs=1e-6)

    async def test_bilinear(self):
        response = await SliceSolver().execute(
            operation="maximize_bilinear_simplex",
            payload={"E": [[0.1, 0.2], [0.3, 0.4]], "p": [[0.25, 0.25], [0.25, 0.25]], "rho": 0.8},
        )
        assert response.success
        assert response.payload["value"] == pytest.approx(0.4, abs=1e-9)


class TestSliceSensitive:
    """Tests for the Sensitive Slice facade."""

    async def test_certify(self, uniform_table):
        response = await SliceSensitive().execute(
            operation="certify", payload={"stats": uniform_table.model_dump(), "rho": 0.8}
        )
        assert response.success
        assert response.payload["value"] == pytest.approx(0.4, abs=1e-9)

    async def test_certify_sweep(self, uniform_table):
        response = await SliceSensitive().execute(
            operation="certify_sweep", payload={"stats": uniform_table.model_dump(), "rhos": [0.6, 0.3]}
        )
        assert [c["rho"] for c in response.payload["certificates"]] == [0.3, 0.6]

    async def test_missing_stats(self):
        response = await SliceSensitive().execute(operation="certify", payload={"rho": 0.3})
        assert not response.success
        assert response.payload["error_type"] == "KeyError"


class TestSliceGeneral:
    """Tests for the General Slice facade."""

    async def test_certify_small_grid(self, uniform_table):
        response = await SliceGeneral().execute(
            operation="certify", payload={"stats": uniform_table.model_dump(), "rho": 0.4, "T": 6}
        )
        assert response.success
        assert response.payload["T"] == 6
        assert response.payload["winning_cell"] is not None

    async def test_cell_bound_infeasible(self, uniform_table):
        cell = {"index": [0, 0], "k_lo": [0.0, 0.0], "k_hi": [0.3, 0.3], "r_lo": [0.0, 0.0], "r_hi": [1.0, 1.0]}
        response = await SliceGeneral().execute(
            operation="cell_bound", payload={"stats": uniform_table.model_dump(), "rho": 0.5, "cell": cell}
        )
        assert response.payload["status"] == "Infeasible"

    async def test_unbounded_table(self, uniform_table):
        table = uniform_table.model_copy(update={"M": None}).model_dump()
        response = await SliceGeneral().execute(operation="certify", payload={"stats": table, "rho": 0.4, "T": 4})
        assert response.payload["error_type"] == "UnboundedLossError"


class TestSliceFairgen:
    """Tests for the Fairgen Slice facade."""

    async def test_gen_gaussian(self):
        response = await SliceFairgen().execute(operation="gen_gaussian", payload={"n": 50, "seed": 1})
        assert len(response.payload["y"]) == 50
        assert len(response.payload["features"][0]) == 2

    async def test_demo_trials(self):
        """Demo samples feed both trial generators."""
        fairgen = SliceFairgen()
        for op in ("gen_sensitive_trials", "gen_general_trials"):
            response = await fairgen.execute(
                operation=op, payload={"demo_gaussian": 2000, "n_trials": 5, "seed": 3}
            )
            assert response.success, response.error_message
            assert len(response.payload["trials"]) == 5

    async def test_general_needs_shifted_loss(self, loss_batch):
        samples = {"s": loss_batch.s.tolist(), "y": loss_batch.y.tolist(), "loss": loss_batch.loss.tolist()}
        response = await SliceFairgen().execute(
            operation="gen_general_trials", payload={"samples": samples, "n_trials": 2}
        )
        assert response.payload["error_type"] == "InvalidInputError"

    async def test_validate(self):
        payload = {
            "trials": [{"seed": 0, "distance": 0.3, "loss": 0.45}],
            "curve": [
                {"rho": 0.2, "bound": 0.3, "feasible": True},
                {"rho": 0.4, "bound": 0.5, "feasible": True},
            ],
            "lookup": "step",
        }
        response = await SliceFairgen().execute(operation="validate", payload=payload)
        assert response.success
        assert response.payload["violations"] == 0
