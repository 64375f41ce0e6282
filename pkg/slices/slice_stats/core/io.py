"""
Samples CSV and StatsTable JSON formats.

Samples CSV headers: ``s,y,loss`` (optionally ``,shifted_loss``) or
``s,y,p0,...,p{C-1}``. Errors name the 1-based file line.
"""
from __future__ import annotations

from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ...exceptions import InvalidInputError
from .types import MASS_TOLERANCE, SampleBatch, StatsTable

PathLike = Union[str, Path]

# header occupies line 1; the first record can sit no earlier than line 2
_FIRST_DATA_LINE = 2


def _drop_blank_rows(frame: pd.DataFrame) -> Tuple[pd.DataFrame, np.ndarray]:
    """Remove blank lines, returning the 1-based file line of every kept row."""
    blank = frame.isna().all(axis=1).to_numpy()
    lines = np.nonzero(~blank)[0] + _FIRST_DATA_LINE
    return frame.loc[~blank].reset_index(drop=True), lines


def _numeric(frame: pd.DataFrame, columns: List[str], lines: np.ndarray) -> np.ndarray:
    values = frame[columns].apply(pd.to_numeric, errors="coerce")
    bad_rows = np.nonzero(values.isna().any(axis=1).to_numpy())[0]
    if bad_rows.size:
        raise InvalidInputError("non-numeric or missing value", line=int(lines[bad_rows[0]]))
    return values.to_numpy(dtype=float)


def _integral(values: np.ndarray, name: str, lines: np.ndarray) -> np.ndarray:
    bad = np.nonzero(values != np.round(values))[0]
    if bad.size:
        raise InvalidInputError(f"{name} must be an integer", line=int(lines[bad[0]]))
    return values.astype(np.int64)


def read_samples_csv(path: PathLike, S: int, C: int) -> SampleBatch:
    """Read a samples CSV in loss or prediction mode."""
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"samples file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=False, quoting=3, skip_blank_lines=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise InvalidInputError(f"cannot parse {path}: {e}") from e

    header = list(frame.columns)
    prediction_header = ["s", "y"] + [f"p{c}" for c in range(C)]
    if header in (["s", "y", "loss"], ["s", "y", "loss", "shifted_loss"]):
        mode = "loss"
    elif header == prediction_header:
        mode = "prediction"
    else:
        raise InvalidInputError(
            f"unexpected header {','.join(header)}; expected s,y,loss or "
            f"{','.join(prediction_header)}",
            line=1,
        )

    frame, lines = _drop_blank_rows(frame)
    keys = _integral(_numeric(frame, ["s", "y"], lines), "s/y", lines)
    s, y = keys[:, 0], keys[:, 1]
    out_of_range = np.nonzero((s < 0) | (s >= S) | (y < 0) | (y >= C))[0]
    if out_of_range.size:
        row = int(out_of_range[0])
        raise InvalidInputError(
            f"key (s={s[row]}, y={y[row]}) outside S={S}, C={C}", line=int(lines[row])
        )

    if mode == "loss":
        loss_columns = header[2:]
        values = _numeric(frame, loss_columns, lines)
        negative = np.nonzero((values < 0).any(axis=1) | ~np.isfinite(values).all(axis=1))[0]
        if negative.size:
            raise InvalidInputError(
                "loss must be finite and non-negative", line=int(lines[negative[0]])
            )
        shifted = values[:, 1] if values.shape[1] == 2 else None
        return SampleBatch(s=s, y=y, loss=values[:, 0], shifted_loss=shifted)

    probs = _numeric(frame, prediction_header[2:], lines)
    malformed = np.nonzero(
        (probs < 0).any(axis=1)
        | (probs > 1).any(axis=1)
        | (np.abs(probs.sum(axis=1) - 1.0) > MASS_TOLERANCE)
    )[0]
    if malformed.size:
        raise InvalidInputError(
            "prediction must be a probability vector", line=int(lines[malformed[0]])
        )
    return SampleBatch(s=s, y=y, predictions=probs)


def write_samples_csv(batch: SampleBatch, path: PathLike) -> None:
    """Write samples in loss mode (plus shifted_loss when present)."""
    if batch.loss is None:
        raise InvalidInputError("only loss-mode samples can be written")
    frame = pd.DataFrame({"s": batch.s, "y": batch.y, "loss": batch.loss})
    if batch.shifted_loss is not None:
        frame["shifted_loss"] = batch.shifted_loss
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def write_stats_json(table: StatsTable, path: PathLike) -> None:
    Path(path).write_text(table.model_dump_json(indent=2) + "\n", encoding="utf-8")


def read_stats_json(path: PathLike) -> StatsTable:
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"stats file not found: {path}")
    try:
        return StatsTable.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise InvalidInputError(f"invalid stats table {path}: {e}") from e
