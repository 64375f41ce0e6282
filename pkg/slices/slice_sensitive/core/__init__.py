from .certify import certify_sensitive, certify_sensitive_fs, certify_sweep
from .types import Certificate, Scenario, SkewOptions

__all__ = [
    "Certificate",
    "Scenario",
    "SkewOptions",
    "certify_sensitive",
    "certify_sensitive_fs",
    "certify_sweep",
]
