"""
Exception hierarchy shared by all certification slices.

Core modules raise these; slice facades translate them into failed
SliceResponse objects and the CLI maps them onto exit codes.
"""
from __future__ import annotations

from typing import Optional, Tuple


class FairCertError(Exception):
    """Base error for the certification engine."""

    exit_code: int = 1


class InvalidInputError(FairCertError, ValueError):
    """Malformed vectors, out-of-range indices, schema problems."""

    exit_code = 2

    def __init__(self, message: str, *, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyCellError(InvalidInputError):
    """A subpopulation cell has fewer samples than required."""

    def __init__(self, cell: Tuple[int, int], count: int, required: int = 2):
        self.cell = cell
        self.count = count
        super().__init__(
            f"subpopulation (s={cell[0]}, y={cell[1]}) has {count} samples, "
            f"at least {required} required"
        )


class UnboundedLossError(InvalidInputError):
    """A finite loss bound M is required but the table is unbounded."""


class OutsideRadiusError(FairCertError, ValueError):
    """Gramian bound requested beyond its applicability radius."""

    exit_code = 2

    def __init__(self, rho_sq: float, gamma_sq: float):
        self.rho_sq = rho_sq
        self.gamma_sq = gamma_sq
        super().__init__(
            f"rho^2={rho_sq:.6g} is outside the applicability radius "
            f"gamma_bar^2={gamma_sq:.6g}"
        )


class SolverFailure(FairCertError, RuntimeError):
    """Internal numerical failure (NaN, exhausted retries)."""

    exit_code = 3
