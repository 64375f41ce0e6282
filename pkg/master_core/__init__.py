"""Master Core Package - orchestration and the command-line commands"""

from .master_core import CertificationCore, OrchestrationRequest, OrchestrationResponse, create_core
from .run_config import RunConfig, load_run_config

__all__ = [
    "CertificationCore",
    "OrchestrationRequest",
    "OrchestrationResponse",
    "RunConfig",
    "create_core",
    "load_run_config",
]
