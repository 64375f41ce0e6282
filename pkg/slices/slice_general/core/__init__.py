from .cells import CellBounds, CellGrid, enumerate_cells
from .certify import (
    CellResult,
    CellStatus,
    SweepOptions,
    SweepOutcome,
    cell_bound,
    cell_prebound,
    certify_general,
    certify_general_fs,
    certify_general_sweep,
    sweep_cells,
)
from .io import SweepPoint, read_sweep_csv, sweep_points, write_sweep_csv
from .relax import CellModel, exact_model, finite_sampling_model

__all__ = [
    "CellBounds",
    "CellGrid",
    "CellModel",
    "CellResult",
    "CellStatus",
    "SweepOptions",
    "SweepOutcome",
    "SweepPoint",
    "cell_bound",
    "cell_prebound",
    "certify_general",
    "certify_general_fs",
    "certify_general_sweep",
    "enumerate_cells",
    "exact_model",
    "finite_sampling_model",
    "read_sweep_csv",
    "sweep_cells",
    "sweep_points",
    "write_sweep_csv",
]
