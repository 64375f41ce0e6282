"""
Unit Tests for Master Core
"""

import pytest

from master_core import CertificationCore, OrchestrationResponse, RunConfig, create_core, load_run_config
from slices.exceptions import InvalidInputError, SolverFailure


@pytest.fixture
async def core():
    """Core with every slice registered."""
    instance = create_core(jobs=2)
    yield instance
    await instance.shutdown()


class TestRouting:
    """Tests for operation routing."""

    def test_resolve_short_prefix(self):
        """Short prefixes map to slice ids."""
        assert CertificationCore.resolve("sensitive.certify") == ("slice_sensitive", "certify")
        assert CertificationCore.resolve("slice_stats.compute_loss") == ("slice_stats", "compute_loss")

    def test_resolve_needs_dot(self):
        """Operations are '<slice>.<operation>'."""
        with pytest.raises(InvalidInputError):
            CertificationCore.resolve("certify")
        with pytest.raises(InvalidInputError):
            CertificationCore.resolve("stats.")

    def test_defaults_registered(self):
        """All seven slices are registered."""
        assert create_core().registered == [
            "slice_bounds",
            "slice_fairgen",
            "slice_general",
            "slice_hellinger",
            "slice_sensitive",
            "slice_solver",
            "slice_stats",
        ]

    def test_jobs_positive(self):
        """jobs must be at least one."""
        with pytest.raises(InvalidInputError):
            CertificationCore(jobs=0)

    async def test_call_returns_payload(self, core):
        """call unwraps a successful response."""
        payload = await core.call("hellinger.hellinger_discrete", {"p": [1.0, 0.0], "q": [0.0, 1.0]})
        assert payload["distance"] == pytest.approx(1.0)

    async def test_unknown_slice(self, core):
        """Unregistered slices fail as input errors."""
        response = await core.execute("nosuch.op")
        assert not response.success
        assert response.error_type == "InvalidInputError"
        with pytest.raises(InvalidInputError):
            await core.call("nosuch.op")

    async def test_unknown_operation(self, core):
        """Unknown operations carry no error type and map to input errors."""
        response = await core.execute("stats.nosuch")
        assert not response.success
        assert response.error_type is None
        assert "Unknown operation" in response.errors[0]
        with pytest.raises(InvalidInputError):
            response.raise_for_error()

    async def test_slice_error_type_is_kept(self, core):
        """Exceptions inside slices surface with their type name."""
        response = await core.execute("bounds.gamma_bar_sq", {"E": 2.0, "V": 0.1, "M": 1.0})
        assert not response.success
        assert response.error_type == "InvalidInputError"

    async def test_health_check(self, core):
        """Requests and errors are counted."""
        await core.call("stats.base_rates", {"q": [[0.25, 0.25], [0.25, 0.25]]})
        await core.execute("stats.nosuch")
        health = await core.health_check()
        assert health["status"] == "healthy"
        assert health["total_requests"] == 2
        assert health["total_errors"] == 1
        assert "slice_stats" in health["slices"]


class TestRaiseForError:
    """Tests for response-to-exception mapping."""

    def _failed(self, error_type):
        return OrchestrationResponse(request_id="r", success=False, errors=["boom"], error_type=error_type)

    def test_success_is_silent(self):
        OrchestrationResponse(request_id="r", success=True).raise_for_error()

    def test_solver_failure(self):
        with pytest.raises(SolverFailure):
            self._failed("SolverFailure").raise_for_error()

    def test_input_errors(self):
        for name in ("InvalidInputError", "EmptyCellError", "UnboundedLossError", "KeyError", None):
            with pytest.raises(InvalidInputError):
                self._failed(name).raise_for_error()

    def test_unexpected_errors_are_internal(self):
        with pytest.raises(SolverFailure):
            self._failed("ZeroDivisionError").raise_for_error()


class TestSweep:
    """Tests for orchestrated radius sweeps."""

    async def test_sorted_by_radius(self, core, uniform_table):
        """Certificates come back in ascending radius order."""
        certs = await core.sweep("sensitive", uniform_table.model_dump(), [0.5, 0.2, 0.3])
        assert [c["rho"] for c in certs] == [0.2, 0.3, 0.5]
        assert all(c["scenario"] == "sensitive" for c in certs)

    async def test_finite_sampling_confidence(self, core, skewed_table):
        """Finite-sampling sensitive certificates report 1 - 2 S C delta."""
        certs = await core.sweep("sensitive", skewed_table.model_dump(), [0.3], finite_sampling=True, delta=0.01)
        assert certs[0]["confidence"] == pytest.approx(0.92)

    async def test_jobs_do_not_change_results(self, skewed_table):
        """One worker and three workers give identical certificates."""
        results = []
        for jobs in (1, 3):
            core = create_core(jobs=jobs)
            try:
                results.append(await core.sweep("general", skewed_table.model_dump(), [0.4, 0.25], T=6))
            finally:
                await core.shutdown()
        assert results[0] == results[1]

    async def test_general_needs_bound(self, core, uniform_table):
        """A table without M fails the general sweep as an input error."""
        table = uniform_table.model_copy(update={"M": None}).model_dump()
        with pytest.raises(InvalidInputError):
            await core.sweep("general", table, [0.3], T=4)

    async def test_bad_arguments(self, core, uniform_table):
        """Unknown scenarios and empty radius lists are rejected."""
        with pytest.raises(InvalidInputError):
            await core.sweep("other", uniform_table.model_dump(), [0.3])
        with pytest.raises(InvalidInputError):
            await core.sweep("sensitive", uniform_table.model_dump(), [])


class TestRunConfig:
    """Tests for command-line configuration."""

    def test_rho_list_sorted(self):
        """Comma lists are parsed and sorted."""
        assert RunConfig(rho="0.3,0.1,0.2").rhos() == [0.1, 0.2, 0.3]

    def test_rho_range_includes_stop(self):
        """Ranges include the stop value."""
        cfg = RunConfig(rho_start=0.05, rho_stop=0.25, rho_step=0.05)
        assert cfg.rhos() == pytest.approx([0.05, 0.1, 0.15, 0.2, 0.25])

    def test_no_radius(self):
        """A config without radii cannot certify."""
        with pytest.raises(InvalidInputError):
            RunConfig().rhos()

    def test_list_and_range_conflict(self):
        """Giving both forms is an input error."""
        with pytest.raises(InvalidInputError):
            load_run_config({"rho": "0.1", "rho_start": 0.1, "rho_stop": 0.2, "rho_step": 0.1})

    def test_rho_outside_range(self):
        """Radii must lie in (0, 1]."""
        with pytest.raises(InvalidInputError):
            load_run_config({"rho": "0.1,1.5"})

    def test_flags_beat_file(self, temp_dir):
        """Flags override the config file; file values fill the rest."""
        path = temp_dir / "run.cfg"
        path.write_text("# run settings\nscenario = general\nrho = 0.4\nGranularity = 12\n")
        cfg = load_run_config({"rho": "0.2", "jobs": None}, path)
        assert cfg.scenario == "general"
        assert cfg.rhos() == [0.2]
        assert cfg.granularity == 12

    def test_file_beats_environment(self, temp_dir, monkeypatch):
        """Environment variables only fill what the file leaves out."""
        monkeypatch.setenv("FAIRCERT_JOBS", "3")
        monkeypatch.setenv("FAIRCERT_SEED", "5")
        path = temp_dir / "run.cfg"
        path.write_text("seed = 9\n")
        cfg = load_run_config({}, path)
        assert cfg.jobs == 3
        assert cfg.seed == 9

    def test_unknown_key(self, temp_dir):
        """Unknown keys are rejected."""
        path = temp_dir / "run.cfg"
        path.write_text("colour = blue\n")
        with pytest.raises(InvalidInputError):
            load_run_config({}, path)

    def test_malformed_line(self, temp_dir):
        """Lines without '=' report their number."""
        path = temp_dir / "run.cfg"
        path.write_text("seed = 1\nnot a setting\n")
        with pytest.raises(InvalidInputError) as info:
            load_run_config({}, path)
        assert info.value.line == 2

    def test_overall_confidence(self):
        """Two quantities per cell for sensitive, three for general."""
        assert RunConfig(delta=0.01).overall_confidence(2, 2) == pytest.approx(0.92)
        assert RunConfig(scenario="general", delta=0.01).overall_confidence(2, 2) == pytest.approx(0.88)
