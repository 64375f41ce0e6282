"""
Master Core - orchestrator for the certification slices.

Responsibilities:
- Slice registration and lifecycle
- Routing of ``"<slice>.<operation>"`` requests
- Fan-out of radius sweeps over a bounded worker pool
"""
from __future__ import annotations

import asyncio
import time
import uuid
from typing import Any, Dict, List, Optional, Sequence, Type

from pydantic import BaseModel, Field, ValidationError

from infrastructure.observability import get_logger, get_metrics, get_tracer
from slices.exceptions import FairCertError, InvalidInputError, SolverFailure
from slices.slice_base import BaseSlice, SliceConfig
from slices.slice_bounds import SliceBounds
from slices.slice_fairgen import SliceFairgen
from slices.slice_general import SliceGeneral
from slices.slice_hellinger import SliceHellinger
from slices.slice_sensitive import SliceSensitive
from slices.slice_solver import SliceSolver
from slices.slice_stats import SliceStats

logger = get_logger(__name__)

# short routing prefix -> slice id
ROUTES: Dict[str, str] = {
    "stats": "slice_stats",
    "hellinger": "slice_hellinger",
    "bounds": "slice_bounds",
    "solver": "slice_solver",
    "sensitive": "slice_sensitive",
    "general": "slice_general",
    "fairgen": "slice_fairgen",
}

# error types raised as input errors when a slice reports them
_INPUT_ERRORS = {
    "InvalidInputError",
    "EmptyCellError",
    "UnboundedLossError",
    "OutsideRadiusError",
    "ValidationError",
    "ValueError",
    "KeyError",
    "TypeError",
}


class OrchestrationRequest(BaseModel):
    """Request for orchestration"""
    request_id: str = Field(default_factory=lambda: str(uuid.uuid4()))
    operation: str
    payload: Dict[str, Any] = Field(default_factory=dict)
    timeout_seconds: Optional[float] = None


class OrchestrationResponse(BaseModel):
    """Response from orchestration"""
    request_id: str
    success: bool
    slice_id: Optional[str] = None
    payload: Dict[str, Any] = Field(default_factory=dict)
    errors: List[str] = Field(default_factory=list)
    error_type: Optional[str] = None
    duration_ms: float = 0.0

    def raise_for_error(self) -> None:
        """Re-raise a failed response as the matching engine error."""
        if self.success:
            return
        message = "; ".join(self.errors) or "operation failed"
        if self.error_type == "SolverFailure":
            raise SolverFailure(message)
        if self.error_type in _INPUT_ERRORS or self.error_type is None:
            raise InvalidInputError(message)
        raise SolverFailure(f"{self.error_type}: {message}")


class CertificationCore:
    """
    Certification orchestrator.

    Owns one instance per registered slice and dispatches operations to
    them. Radius sweeps run one slice call per radius, at most ``jobs``
    at a time; results come back in input order regardless of ``jobs``.
    """

    orchestrator_id = "master_core"

    def __init__(self, jobs: int = 1):
        if jobs < 1:
            raise InvalidInputError(f"jobs must be at least 1, got {jobs}")
        self.jobs = jobs
        self._slice_classes: Dict[str, Type[BaseSlice]] = {}
        self._configs: Dict[str, Optional[SliceConfig]] = {}
        self._slices: Dict[str, BaseSlice] = {}
        self._total_requests = 0
        self._total_errors = 0

    # -------------------------------------------------------------------------
    # Slice Registration
    # -------------------------------------------------------------------------

    def register_slice(self, slice_class: Type[BaseSlice], config: Optional[SliceConfig] = None) -> None:
        self._slice_classes[slice_class.slice_id] = slice_class
        self._configs[slice_class.slice_id] = config
        logger.debug("slice_registered", slice=slice_class.slice_id)

    def register_defaults(self) -> "CertificationCore":
        for cls in (SliceStats, SliceHellinger, SliceBounds, SliceSolver, SliceSensitive, SliceGeneral, SliceFairgen):
            if cls.slice_id not in self._slice_classes:
                self.register_slice(cls)
        return self

    @property
    def registered(self) -> List[str]:
        return sorted(self._slice_classes)

    async def get_slice(self, slice_id: str) -> BaseSlice:
        if slice_id not in self._slice_classes:
            raise InvalidInputError(f"slice not registered: {slice_id}")
        if slice_id not in self._slices:
            instance = self._slice_classes[slice_id](self._configs[slice_id])
            await instance.initialize()
            await instance.start()
            self._slices[slice_id] = instance
        return self._slices[slice_id]

    async def shutdown(self) -> None:
        for instance in self._slices.values():
            await instance.stop()
        self._slices.clear()

    # -------------------------------------------------------------------------
    # Request Orchestration
    # -------------------------------------------------------------------------

    @staticmethod
    def resolve(operation: str) -> tuple:
        """``"sensitive.certify"`` -> (``"slice_sensitive"``, ``"certify"``)."""
        prefix, sep, op = operation.partition(".")
        if not sep or not op:
            raise InvalidInputError(f"operation must look like '<slice>.<operation>', got {operation!r}")
        slice_id = ROUTES.get(prefix, prefix)
        return slice_id, op

    async def orchestrate(self, request: OrchestrationRequest) -> OrchestrationResponse:
        start = time.perf_counter()
        self._total_requests += 1
        response = OrchestrationResponse(request_id=request.request_id, success=False)
        try:
            slice_id, op = self.resolve(request.operation)
            response.slice_id = slice_id
            instance = await self.get_slice(slice_id)
            call = instance.execute(operation=op, payload=request.payload)
            if request.timeout_seconds is not None:
                result = await asyncio.wait_for(call, timeout=request.timeout_seconds)
            else:
                result = await call
            response.success = result.success
            response.payload = result.payload
            if not result.success:
                response.errors.append(result.error_message or "operation failed")
                response.error_type = result.payload.get("error_type")
        except asyncio.TimeoutError:
            response.errors.append(f"{request.operation} timed out")
            response.error_type = "SolverFailure"
        except FairCertError as e:
            response.errors.append(str(e))
            response.error_type = type(e).__name__
        except ValidationError as e:
            response.errors.append(str(e))
            response.error_type = "ValidationError"

        response.duration_ms = (time.perf_counter() - start) * 1000
        if not response.success:
            self._total_errors += 1
        get_metrics().increment(
            "orchestrated_requests_total",
            labels={"operation": request.operation, "success": str(response.success).lower()},
        )
        return response

    async def execute(self, operation: str, payload: Optional[Dict[str, Any]] = None) -> OrchestrationResponse:
        return await self.orchestrate(OrchestrationRequest(operation=operation, payload=payload or {}))

    async def call(self, operation: str, payload: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Execute and return the payload, raising on failure."""
        response = await self.execute(operation, payload)
        response.raise_for_error()
        return response.payload

    # -------------------------------------------------------------------------
    # Radius sweeps
    # -------------------------------------------------------------------------

    async def sweep(
        self,
        scenario: str,
        stats: Dict[str, Any],
        rhos: Sequence[float],
        *,
        finite_sampling: bool = False,
        delta: float = 0.1,
        skew: Optional[Dict[str, Any]] = None,
        T: Optional[int] = None,
    ) -> List[Dict[str, Any]]:
        """One certificate per radius, sorted by radius."""
        if scenario not in ("sensitive", "general"):
            raise InvalidInputError(f"unknown scenario {scenario!r}")
        if not rhos:
            raise InvalidInputError("no radii to certify")
        op = f"{scenario}.certify_fs" if finite_sampling else f"{scenario}.certify"
        base: Dict[str, Any] = {"stats": stats, "skew": skew or {}, "delta": delta}
        if scenario == "general":
            if T is not None:
                base["T"] = T
            # a single radius gets the whole pool for its cells
            base["jobs"] = self.jobs if len(rhos) == 1 else 1

        semaphore = asyncio.Semaphore(self.jobs)

        async def one(rho: float) -> Dict[str, Any]:
            async with semaphore:
                return await self.call(op, {**base, "rho": float(rho)})

        with get_tracer().trace("orchestrated_sweep", labels={"scenario": scenario}):
            certificates = await asyncio.gather(*(one(r) for r in sorted(rhos)))
        logger.info(
            "sweep_done",
            scenario=scenario,
            radii=len(rhos),
            feasible=sum(1 for c in certificates if c["feasible"]),
            jobs=self.jobs,
        )
        return list(certificates)

    # -------------------------------------------------------------------------
    # Status
    # -------------------------------------------------------------------------

    async def health_check(self) -> Dict[str, Any]:
        slices = {sid: await s.health_check() for sid, s in self._slices.items()}
        return {
            "status": "healthy",
            "orchestrator": self.orchestrator_id,
            "registered": self.registered,
            "slices": slices,
            "total_requests": self._total_requests,
            "total_errors": self._total_errors,
        }


def create_core(jobs: int = 1) -> CertificationCore:
    """Core with every certification slice registered."""
    return CertificationCore(jobs=jobs).register_defaults()
