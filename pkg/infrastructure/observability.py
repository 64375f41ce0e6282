"""
Observability Module for faircert.

Structured logging through structlog, prometheus counters for certificates,
cell sweeps and slice executions, and a tracer that times certification
operations. Nothing here feeds back into numeric results.
"""

import asyncio
import logging
import sys
import threading
import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass
from functools import wraps
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import structlog
from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest


# =============================================================================
# Structured Logging
# =============================================================================

_logging_configured = False


def configure_logging(level: str = "WARNING", json_output: bool = True) -> None:
    """
    Configure structlog for the process.

    Log lines go to stderr; stdout is reserved for command summaries.
    """
    global _logging_configured
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING

    renderer = (
        structlog.processors.JSONRenderer(sort_keys=True)
        if json_output
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
    _logging_configured = True


def get_logger(name: str) -> Any:
    """Structured logger bound to a module name."""
    if not _logging_configured:
        configure_logging()
    return structlog.get_logger(name).bind(logger=name)


# =============================================================================
# Metrics
# =============================================================================

DURATION_BUCKETS = (0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 30.0, 120.0)


@dataclass(frozen=True)
class CounterSpec:
    """A counter family known in advance."""
    name: str
    description: str
    labels: Tuple[str, ...] = ()


KNOWN_COUNTERS: Tuple[CounterSpec, ...] = (
    CounterSpec("certificates_total", "Certificates computed", ("scenario", "mode", "feasible")),
    CounterSpec("cells_solved_total", "General-shifting cells solved"),
    CounterSpec("cells_pruned_total", "General-shifting cells skipped by their pre-bound"),
    CounterSpec("slice_executions_total", "Slice operations executed", ("slice", "success")),
    CounterSpec("orchestrated_requests_total", "Requests routed by the core", ("operation", "success")),
)


class MetricsCollector:
    """
    Prometheus counters and an operation-duration histogram.

    Every collector owns its registry, so separate collectors never share
    series. Counters outside KNOWN_COUNTERS are created on first use with
    the label names of that first call.
    """

    def __init__(self, prefix: str = "faircert", enabled: bool = True):
        self.prefix = prefix
        self.enabled = enabled
        self.registry = CollectorRegistry()
        self._lock = threading.Lock()
        self._counters: Dict[str, Counter] = {}
        self._totals: Dict[str, float] = defaultdict(float)
        for spec in KNOWN_COUNTERS:
            self._register_counter(spec.name, spec.description, spec.labels)
        self._durations = Histogram(
            self._full_name("operation_seconds"),
            "Wall time of traced operations",
            ["operation"],
            buckets=DURATION_BUCKETS,
            registry=self.registry,
        )

    def _full_name(self, name: str) -> str:
        return f"{self.prefix}_{name}" if self.prefix else name

    def _register_counter(self, name: str, description: str, labels: Sequence[str]) -> Counter:
        counter = Counter(self._full_name(name), description, list(labels), registry=self.registry)
        self._counters[name] = counter
        return counter

    def increment(self, name: str, value: float = 1, labels: Optional[Dict[str, str]] = None) -> None:
        """Add value to a counter, creating it if needed."""
        if not self.enabled:
            return
        with self._lock:
            counter = self._counters.get(name)
            if counter is None:
                counter = self._register_counter(name, name.replace("_", " "), sorted(labels or {}))
            self._totals[name] += value
        if labels:
            counter.labels(**labels).inc(value)
        else:
            counter.inc(value)

    def observe_duration(self, operation: str, seconds: float) -> None:
        if self.enabled:
            self._durations.labels(operation=operation).observe(seconds)

    def get_total(self, name: str) -> float:
        """Sum of a counter over all its label sets."""
        with self._lock:
            return self._totals.get(name, 0.0)

    def exposition(self) -> bytes:
        """Metrics in the Prometheus text format."""
        return generate_latest(self.registry)


_metrics_collector: Optional[MetricsCollector] = None


def get_metrics() -> MetricsCollector:
    """Process-wide metrics collector."""
    global _metrics_collector
    if _metrics_collector is None:
        _metrics_collector = MetricsCollector()
    return _metrics_collector


# =============================================================================
# Performance Tracing
# =============================================================================

class PerformanceTracer:
    """Times operations and reports them to a MetricsCollector."""

    def __init__(self, metrics: Optional[MetricsCollector] = None):
        self._metrics = metrics
        self._durations: Dict[str, List[float]] = defaultdict(list)
        self._lock = threading.Lock()

    @property
    def metrics(self) -> MetricsCollector:
        return self._metrics or get_metrics()

    @contextmanager
    def trace(self, operation: str, labels: Optional[Dict[str, str]] = None) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            with self._lock:
                self._durations[operation].append(elapsed)
            self.metrics.observe_duration(operation, elapsed)
            if labels:
                get_logger(__name__).debug("operation_timed", operation=operation, seconds=elapsed, **labels)

    def summary(self, operation: str) -> Optional[Dict[str, float]]:
        """Count, total, mean and max wall time of one operation."""
        with self._lock:
            values = list(self._durations.get(operation, ()))
        if not values:
            return None
        total = sum(values)
        return {"count": len(values), "total": total, "mean": total / len(values), "max": max(values)}

    def reset(self) -> None:
        with self._lock:
            self._durations.clear()


_tracer: Optional[PerformanceTracer] = None


def get_tracer() -> PerformanceTracer:
    """Process-wide tracer."""
    global _tracer
    if _tracer is None:
        _tracer = PerformanceTracer()
    return _tracer


def trace_operation(name: Optional[str] = None):
    """Decorator timing a sync or async callable under `name`."""

    def decorator(func):
        operation = name or func.__name__

        if asyncio.iscoroutinefunction(func):
            @wraps(func)
            async def async_wrapper(*args, **kwargs):
                with get_tracer().trace(operation):
                    return await func(*args, **kwargs)
            return async_wrapper

        @wraps(func)
        def sync_wrapper(*args, **kwargs):
            with get_tracer().trace(operation):
                return func(*args, **kwargs)
        return sync_wrapper

    return decorator
