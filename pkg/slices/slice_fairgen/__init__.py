"""
Fairgen Slice - Vertical Slice for fair-distribution simulation and certificate validation
"""

from .slice import FairgenConfig, SliceFairgen

__all__ = [
    'FairgenConfig',
    'SliceFairgen',
]
