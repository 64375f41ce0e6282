"""
Hellinger Slice - Vertical Slice for distribution distances
"""

from .slice import HellingerConfig, SliceHellinger

__all__ = [
    'HellingerConfig',
    'SliceHellinger',
]
