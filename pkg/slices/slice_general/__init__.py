"""
General Slice - Vertical Slice for general-shifting fairness certificates
"""

from .slice import GeneralConfig, SliceGeneral

__all__ = [
    'GeneralConfig',
    'SliceGeneral',
]
