"""
Shared slice machinery.

A slice owns one numerical concern: pure functions in its ``core/``
package and an async facade that maps operation names to handlers. The
facade never raises; failures come back as responses carrying the error
message and the exception type name.
"""
from __future__ import annotations

import time
import uuid
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Awaitable, Callable, Dict, List, Optional, Type

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from infrastructure.observability import get_logger, get_metrics

logger = get_logger(__name__)

Handler = Callable[[Dict[str, Any]], Awaitable[Dict[str, Any]]]


def _now() -> datetime:
    return datetime.now(timezone.utc)


def _new_id() -> str:
    return str(uuid.uuid4())


class SliceState(str, Enum):
    CREATED = "created"
    READY = "ready"
    RUNNING = "running"
    STOPPED = "stopped"


# =============================================================================
# Configuration
# =============================================================================

class SliceConfig(BaseSettings):
    """Settings common to every slice; subclasses add their tunables."""
    model_config = SettingsConfigDict(env_prefix="FAIRCERT_", extra="ignore")

    slice_id: str = "base_slice"
    slice_name: str = "Base Slice"
    slice_version: str = "1.0.0"
    debug: bool = False


# =============================================================================
# Request / Response
# =============================================================================

class SliceRequest(BaseModel):
    request_id: str = Field(default_factory=_new_id)
    slice_id: str = ""
    operation: str
    payload: Dict[str, Any] = Field(default_factory=dict)
    timestamp: datetime = Field(default_factory=_now)


class SliceResponse(BaseModel):
    request_id: str
    success: bool
    payload: Dict[str, Any] = Field(default_factory=dict)
    error_message: Optional[str] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)
    timestamp: datetime = Field(default_factory=_now)


class SliceCapabilities(BaseModel):
    """Operations a slice answers, qualified and bare."""
    capabilities: List[str] = Field(default_factory=list)
    supported_operations: List[str] = Field(default_factory=list)


# =============================================================================
# Execution counters
# =============================================================================

class SliceMetrics:
    """Per-slice execution counts and latency."""

    def __init__(self, slice_id: str):
        self.slice_id = slice_id
        self.executions = 0
        self.errors = 0
        self.latency_ms = 0.0

    def record_execution(self, latency_ms: float, success: bool) -> None:
        self.executions += 1
        self.latency_ms += latency_ms
        self.errors += 0 if success else 1
        get_metrics().increment(
            "slice_executions_total",
            labels={"slice": self.slice_id, "success": str(success).lower()},
        )

    @property
    def error_rate(self) -> float:
        return self.errors / self.executions if self.executions else 0.0

    def get_stats(self) -> Dict[str, Any]:
        return {
            "slice_id": self.slice_id,
            "total_executions": self.executions,
            "total_errors": self.errors,
            "avg_latency_ms": round(self.latency_ms / self.executions, 2) if self.executions else 0.0,
            "error_rate": round(self.error_rate, 4),
        }


# =============================================================================
# Base slice
# =============================================================================

class BaseSlice:
    """Lifecycle, dispatch and error translation shared by all slices."""

    slice_id: str = "base_slice"
    slice_name: str = "Base Slice"
    slice_version: str = "1.0.0"
    config_class: Type[SliceConfig] = SliceConfig

    def __init__(self, config: Optional[SliceConfig] = None):
        self._config = config or self.config_class(slice_id=self.slice_id)
        self._state = SliceState.CREATED
        self._metrics = SliceMetrics(self.slice_id)

    @property
    def config(self) -> SliceConfig:
        return self._config

    @property
    def state(self) -> SliceState:
        return self._state

    @property
    def metrics(self) -> SliceMetrics:
        return self._metrics

    def _operations(self) -> Dict[str, Handler]:
        """Operation name -> async handler."""
        return {}

    async def initialize(self) -> None:
        self._state = SliceState.READY
        logger.debug("slice_initialized", slice=self.slice_id)

    async def start(self) -> None:
        self._state = SliceState.RUNNING

    async def stop(self) -> None:
        self._state = SliceState.STOPPED

    async def health_check(self) -> Dict[str, Any]:
        if self._state is SliceState.STOPPED:
            status = "unhealthy"
        elif self._metrics.executions and self._metrics.error_rate > 0.5:
            status = "degraded"
        else:
            status = "healthy"
        return {
            "status": status,
            "slice": self.slice_id,
            "version": self.slice_version,
            "metrics": self._metrics.get_stats(),
        }

    async def get_capabilities(self) -> SliceCapabilities:
        ops = list(self._operations())
        return SliceCapabilities(
            capabilities=[f"{self.slice_id}.{op}" for op in ops],
            supported_operations=ops,
        )

    async def execute(
        self,
        request: Optional[SliceRequest] = None,
        *,
        operation: Optional[str] = None,
        payload: Optional[Dict[str, Any]] = None,
    ) -> SliceResponse:
        """Run one operation, given either a request or its parts."""
        if request is None:
            request = SliceRequest(slice_id=self.slice_id, operation=operation or "", payload=payload or {})
        if self._state is SliceState.CREATED:
            await self.initialize()

        handler = self._operations().get(request.operation)
        if handler is None:
            message = f"Unknown operation: {request.operation}"
            return SliceResponse(
                request_id=request.request_id,
                success=False,
                error_message=message,
                payload={"error": message},
            )

        start = time.perf_counter()
        try:
            result = await handler(request.payload)
            success = True
        except Exception as e:
            logger.error("slice_operation_failed", slice=self.slice_id, operation=request.operation, error=str(e))
            result = {"error": str(e), "error_type": type(e).__name__}
            success = False
        latency_ms = (time.perf_counter() - start) * 1000
        self._metrics.record_execution(latency_ms, success)

        return SliceResponse(
            request_id=request.request_id,
            success=success,
            payload=result,
            error_message=None if success else result["error"],
            metadata={"slice": self.slice_id, "operation": request.operation, "latency_ms": round(latency_ms, 3)},
        )
