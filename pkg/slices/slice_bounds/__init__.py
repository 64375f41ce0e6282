"""
Bounds Slice - Vertical Slice for confidence intervals and shifted-loss bounds
"""

from .slice import BoundsConfig, SliceBounds

__all__ = [
    'BoundsConfig',
    'SliceBounds',
]
