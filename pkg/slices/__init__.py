"""
Slices Package - one vertical slice per certification concern
"""

from .slice_base import BaseSlice, SliceConfig, SliceRequest, SliceResponse, SliceState

__all__ = [
    "BaseSlice",
    "SliceConfig",
    "SliceRequest",
    "SliceResponse",
    "SliceState",
]
