"""
Sweep CSV (``rho,bound,feasible``), one row per radius in ascending order.

Infeasible radii leave ``bound`` empty.
"""
from __future__ import annotations

from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ...exceptions import InvalidInputError
from ...slice_sensitive.core import Certificate

PathLike = Union[str, Path]

SWEEP_COLUMNS = ["rho", "bound", "feasible"]


class SweepPoint(BaseModel):
    rho: float
    bound: Optional[float] = None
    feasible: bool


def sweep_points(certificates: Sequence[Certificate]) -> List[SweepPoint]:
    points = [SweepPoint(rho=c.rho, bound=c.value, feasible=c.feasible) for c in certificates]
    return sorted(points, key=lambda p: p.rho)


def write_sweep_csv(points: Sequence[SweepPoint], path: PathLike) -> None:
    frame = pd.DataFrame(
        {
            "rho": [p.rho for p in points],
            "bound": [p.bound if p.feasible else None for p in points],
            "feasible": ["true" if p.feasible else "false" for p in points],
        },
        columns=SWEEP_COLUMNS,
    )
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def read_sweep_csv(path: PathLike) -> List[SweepPoint]:
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"sweep file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InvalidInputError(f"cannot parse {path}: {e}") from e
    if list(frame.columns) != SWEEP_COLUMNS:
        raise InvalidInputError(
            f"unexpected header {','.join(frame.columns)}; expected {','.join(SWEEP_COLUMNS)}", line=1
        )
    points: List[SweepPoint] = []
    for row, (rho, bound, feasible) in enumerate(frame.itertuples(index=False, name=None)):
        line = row + 2
        flag = feasible.strip().lower()
        if flag not in ("true", "false"):
            raise InvalidInputError(f"feasible must be true or false, got {feasible!r}", line=line)
        try:
            rho_value = float(rho)
            bound_value = float(bound) if bound.strip() else None
        except ValueError as e:
            raise InvalidInputError(f"non-numeric value: {e}", line=line) from e
        if flag == "true" and (bound_value is None or not np.isfinite(bound_value)):
            raise InvalidInputError("feasible row needs a finite bound", line=line)
        points.append(SweepPoint(rho=rho_value, bound=bound_value if flag == "true" else None, feasible=flag == "true"))
    rhos = [p.rho for p in points]
    if rhos != sorted(rhos):
        raise InvalidInputError("sweep rows must be sorted by rho")
    return points
