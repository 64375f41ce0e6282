"""
Unit Tests for logging, metrics and tracing
"""

import asyncio

from infrastructure.observability import (
    MetricsCollector,
    PerformanceTracer,
    get_metrics,
    get_tracer,
    trace_operation,
)
from slices.slice_sensitive.core import certify_sensitive


class TestMetricsCollector:
    """Tests for MetricsCollector."""

    def test_known_counter_with_labels(self):
        """Known counters accept their label sets and sum across them."""
        metrics = MetricsCollector()
        metrics.increment("certificates_total", labels={"scenario": "sensitive", "mode": "exact", "feasible": "true"})
        metrics.increment("certificates_total", labels={"scenario": "general", "mode": "exact", "feasible": "false"})
        assert metrics.get_total("certificates_total") == 2
        text = metrics.exposition().decode()
        assert 'scenario="general",mode="exact",feasible="false"' in text

    def test_ad_hoc_counter(self):
        """Unknown counters are created on first use."""
        metrics = MetricsCollector()
        metrics.increment("trials_generated_total", value=5)
        assert metrics.get_total("trials_generated_total") == 5
        assert b"faircert_trials_generated_total 5.0" in metrics.exposition()

    def test_disabled(self):
        """A disabled collector records nothing."""
        metrics = MetricsCollector(enabled=False)
        metrics.increment("cells_solved_total", value=3)
        assert metrics.get_total("cells_solved_total") == 0

    def test_collectors_are_independent(self):
        """Each collector has its own registry."""
        a, b = MetricsCollector(), MetricsCollector()
        a.increment("cells_pruned_total")
        assert b.get_total("cells_pruned_total") == 0


class TestTracing:
    """Tests for PerformanceTracer and trace_operation."""

    def test_trace_records_duration(self):
        tracer = PerformanceTracer(MetricsCollector())
        with tracer.trace("unit"):
            pass
        with tracer.trace("unit"):
            pass
        summary = tracer.summary("unit")
        assert summary["count"] == 2
        assert summary["max"] >= summary["mean"] >= 0.0
        assert tracer.summary("other") is None

    def test_trace_survives_exceptions(self):
        """Durations are recorded even when the body raises."""
        tracer = PerformanceTracer(MetricsCollector())
        try:
            with tracer.trace("failing"):
                raise RuntimeError("boom")
        except RuntimeError:
            pass
        assert tracer.summary("failing")["count"] == 1

    def test_decorator_sync_and_async(self):
        @trace_operation("sync_op")
        def double(x):
            return 2 * x

        @trace_operation()
        async def triple(x):
            return 3 * x

        before = (get_tracer().summary("triple") or {"count": 0})["count"]
        assert double(2) == 4
        assert asyncio.run(triple(2)) == 6
        assert get_tracer().summary("sync_op")["count"] >= 1
        assert get_tracer().summary("triple")["count"] == before + 1

    def test_certificates_are_counted(self, uniform_table):
        """Certifiers feed the process-wide collector."""
        before = get_metrics().get_total("certificates_total")
        certify_sensitive(uniform_table, 0.3)
        assert get_metrics().get_total("certificates_total") == before + 1
        assert get_tracer().summary("certify_sensitive")["count"] >= 1
