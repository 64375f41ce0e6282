"""
Stats Slice - Vertical Slice for subpopulation statistics

Aggregates per-sample losses into S x C tables and evaluates DP/EO gaps.
"""

from .slice import SliceStats, StatsConfig

__all__ = [
    'SliceStats',
    'StatsConfig',
]
