"""
Trials CSV (``seed,distance,loss``) and validation report JSON.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
import pandas as pd

from ...exceptions import InvalidInputError
from .types import ShiftTrial, TrialPoint, ValidationReport

PathLike = Union[str, Path]

TRIAL_COLUMNS = ["seed", "distance", "loss"]


def write_trials_csv(trials: Sequence[Union[ShiftTrial, TrialPoint]], path: PathLike) -> None:
    """An empty trial list still writes the header."""
    frame = pd.DataFrame(
        {
            "seed": pd.Series([t.seed for t in trials], dtype="int64"),
            "distance": pd.Series([t.distance for t in trials], dtype=float),
            "loss": pd.Series([t.loss for t in trials], dtype=float),
        },
        columns=TRIAL_COLUMNS,
    )
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def read_trials_csv(path: PathLike) -> List[TrialPoint]:
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"trials file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InvalidInputError(f"cannot parse {path}: {e}") from e
    if list(frame.columns) != TRIAL_COLUMNS:
        raise InvalidInputError(
            f"unexpected header {','.join(frame.columns)}; expected {','.join(TRIAL_COLUMNS)}", line=1
        )
    points: List[TrialPoint] = []
    for row, (seed, distance, loss) in enumerate(frame.itertuples(index=False, name=None)):
        line = row + 2
        try:
            seed_value = int(seed)
            distance_value = float(distance)
            loss_value = float(loss)
        except ValueError as e:
            raise InvalidInputError(f"malformed trial row: {e}", line=line) from e
        if not (np.isfinite(distance_value) and 0.0 <= distance_value <= 1.0):
            raise InvalidInputError(f"distance {distance!r} outside [0, 1]", line=line)
        if not np.isfinite(loss_value):
            raise InvalidInputError("loss must be finite", line=line)
        points.append(TrialPoint(seed=seed_value, distance=distance_value, loss=loss_value))
    return points


def write_report_json(report: ValidationReport, path: PathLike) -> None:
    payload = report.model_dump(mode="json")
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
