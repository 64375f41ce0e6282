"""
Solver Slice - Vertical Slice for the constrained maximizers used by both certifiers
"""

from .slice import SliceSolver, SolverConfig

__all__ = [
    'SliceSolver',
    'SolverConfig',
]
