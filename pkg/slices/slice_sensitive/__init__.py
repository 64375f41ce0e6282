"""
Sensitive Slice - Vertical Slice for sensitive-shifting fairness certificates
"""

from .slice import SensitiveConfig, SliceSensitive

__all__ = [
    'SensitiveConfig',
    'SliceSensitive',
]
