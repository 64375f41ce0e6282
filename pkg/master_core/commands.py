"""
CLI commands: stats, certify, gen, validate, plot.

Every command reads a RunConfig, talks to the slices through the
CertificationCore and writes its files on the calling task. Summaries go
to stdout; logs go to stderr.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from infrastructure.observability import get_logger
from slices.exceptions import InvalidInputError
from slices.slice_fairgen import SliceFairgen
from slices.slice_fairgen.core import (
    ShiftTrial,
    ValidationReport,
    read_trials_csv,
    write_report_json,
    write_trials_csv,
)
from slices.slice_general.core import read_sweep_csv, sweep_points, write_sweep_csv
from slices.slice_sensitive.core import Certificate
from slices.slice_stats.core import (
    SampleBatch,
    StatsTable,
    read_samples_csv,
    read_stats_json,
    write_samples_csv,
    write_stats_json,
)

from .master_core import CertificationCore
from .plotting import write_svg
from .run_config import RunConfig

logger = get_logger(__name__)

Echo = Callable[[str], None]

STATS_FILE = "stats.json"
CERTIFICATES_FILE = "certificates.json"
SWEEP_FILE = "sweep.csv"
SAMPLES_FILE = "samples.csv"
TRIALS_FILE = "trials.csv"
REPORT_FILE = "report.json"
PLOT_FILE = "plot.svg"


def _out_dir(cfg: RunConfig) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg.out


def _dump_json(data: Any, path: Path) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _batch_payload(batch: SampleBatch) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"s": batch.s.tolist(), "y": batch.y.tolist()}
    for name in ("loss", "predictions", "shifted_loss"):
        value = getattr(batch, name)
        if value is not None:
            payload[name] = value.tolist()
    return payload


async def _demo_samples(cfg: RunConfig, core: CertificationCore) -> SampleBatch:
    fairgen = await core.get_slice(SliceFairgen.slice_id)
    return fairgen.demo_samples(cfg.demo_gaussian, cfg.seed, cfg.loss)


async def _load_stats(cfg: RunConfig, core: CertificationCore) -> StatsTable:
    if cfg.stats is not None:
        table = read_stats_json(cfg.stats)
    elif cfg.samples is not None:
        payload = await core.call(
            "stats.aggregate_stats",
            {"path": str(cfg.samples), "S": cfg.S, "C": cfg.C, "kind": cfg.loss.value},
        )
        table = StatsTable.model_validate(payload["table"])
    elif cfg.demo_gaussian is not None:
        batch = await _demo_samples(cfg, core)
        payload = await core.call(
            "stats.aggregate_stats",
            {
                "samples": [{"key": {"s": int(s), "y": int(y)}, "loss": float(l)} for s, y, l in zip(batch.s, batch.y, batch.loss)],
                "S": 2,
                "C": 2,
                "kind": cfg.loss.value,
            },
        )
        table = StatsTable.model_validate(payload["table"])
    else:
        raise InvalidInputError("certify needs --stats, --samples or --demo-gaussian")
    if cfg.M is not None:
        payload = await core.call("stats.with_loss_bound", {"table": table.model_dump(), "M": cfg.M})
        table = StatsTable.model_validate(payload["table"])
    return table


# =============================================================================
# Commands
# =============================================================================

async def cmd_stats(cfg: RunConfig, core: CertificationCore, echo: Echo = print) -> StatsTable:
    """Aggregate samples into stats.json and echo the table."""
    if cfg.samples is None and cfg.demo_gaussian is None:
        raise InvalidInputError("stats needs --samples or --demo-gaussian")
    table = await _load_stats(cfg.model_copy(update={"stats": None}), core)
    path = _out_dir(cfg) / STATS_FILE
    write_stats_json(table, path)
    echo(f"S={table.S} C={table.C} M={table.M} total={table.total}")
    for cell in table.cells:
        echo(f"  (s={cell.s}, y={cell.y}) n={cell.n} p={cell.p:.6g} E={cell.E:.6g} V={cell.V:.6g}")
    echo(f"wrote {path}")
    return table


async def cmd_certify(cfg: RunConfig, core: CertificationCore, echo: Echo = print) -> List[Certificate]:
    """One certificate per radius; infeasible radii are reported, not raised."""
    table = await _load_stats(cfg, core)
    skew = cfg.skew_options()
    skew.check(table.S, table.C)
    certificates = await core.sweep(
        cfg.scenario,
        table.model_dump(),
        cfg.rhos(),
        finite_sampling=cfg.finite_sampling,
        delta=cfg.delta,
        skew=skew.model_dump(),
        T=cfg.granularity,
    )
    certs = [Certificate.model_validate(c) for c in certificates]

    out = _out_dir(cfg)
    _dump_json(certificates, out / CERTIFICATES_FILE)
    write_sweep_csv(sweep_points(certs), out / SWEEP_FILE)
    if cfg.finite_sampling:
        echo(f"overall confidence >= {cfg.overall_confidence(table.S, table.C):.6g} (delta={cfg.delta:g})")
    for cert in certs:
        if cert.feasible:
            echo(f"rho={cert.rho:.6g} bound={cert.value:.10g}")
        else:
            floor = "n/a" if cert.min_feasible_rho is None else f"{cert.min_feasible_rho:.6g}"
            echo(f"rho={cert.rho:.6g} infeasible (min feasible rho {floor})")
    echo(f"wrote {out / CERTIFICATES_FILE} and {out / SWEEP_FILE}")
    return certs


async def cmd_gen(cfg: RunConfig, core: CertificationCore, echo: Echo = print) -> List[ShiftTrial]:
    """Seeded fair-distribution trials for the chosen scenario."""
    out = _out_dir(cfg)
    if cfg.demo_gaussian is not None:
        batch = await _demo_samples(cfg, core)
        write_samples_csv(batch, out / SAMPLES_FILE)
    elif cfg.samples is not None:
        batch = read_samples_csv(cfg.samples, 2, 2)
    else:
        raise InvalidInputError("gen needs --samples or --demo-gaussian")
    if cfg.scenario == "general" and batch.shifted_loss is None:
        raise InvalidInputError("general shifting needs a shifted_loss column in the samples CSV")

    op = "fairgen.gen_sensitive_trials" if cfg.scenario == "sensitive" else "fairgen.gen_general_trials"
    payload = await core.call(
        op,
        {"samples": _batch_payload(batch), "n_trials": cfg.trials, "seed": cfg.seed, "loss": cfg.loss.value},
    )
    trials = [ShiftTrial.model_validate(t) for t in payload["trials"]]
    write_trials_csv(trials, out / TRIALS_FILE)
    echo(f"generated {len(trials)} {cfg.scenario} trials (seed={cfg.seed})")
    echo(f"wrote {out / TRIALS_FILE}")
    return trials


async def cmd_validate(cfg: RunConfig, core: CertificationCore, echo: Echo = print):
    """Compare a trials CSV against a sweep CSV and write report.json."""
    if cfg.sweep is None or cfg.trials_csv is None:
        raise InvalidInputError("validate needs --sweep and --trials-csv")
    points = read_sweep_csv(cfg.sweep)
    trials = read_trials_csv(cfg.trials_csv)
    payload = await core.call(
        "fairgen.validate",
        {
            "trials": [t.model_dump() for t in trials],
            "curve": [p.model_dump() for p in points],
            "tolerance": cfg.tolerance,
            "lookup": cfg.lookup,
        },
    )
    report = ValidationReport.model_validate(payload)
    path = _out_dir(cfg) / REPORT_FILE
    write_report_json(report, path)
    gap = "n/a" if report.tightness_gap is None else f"{report.tightness_gap:.6g}"
    echo(
        f"max_violation={report.max_violation:.6g} violations={report.violations} "
        f"tightness_gap={gap} evaluated={report.evaluated} excluded={report.excluded}"
    )
    echo(f"wrote {path}")
    return report


async def cmd_plot(cfg: RunConfig, core: CertificationCore, echo: Echo = print) -> Path:
    """SVG chart of the sweep with the optional trial scatter."""
    if cfg.sweep is None:
        raise InvalidInputError("plot needs --sweep")
    points = read_sweep_csv(cfg.sweep)
    trials = read_trials_csv(cfg.trials_csv) if cfg.trials_csv is not None else None
    path = _out_dir(cfg) / PLOT_FILE
    write_svg(path, points, trials)
    echo(f"wrote {path}")
    return path


COMMANDS: Dict[str, Callable] = {
    "stats": cmd_stats,
    "certify": cmd_certify,
    "gen": cmd_gen,
    "validate": cmd_validate,
    "plot": cmd_plot,
}


async def run_command(name: str, cfg: RunConfig, echo: Optional[Echo] = None) -> Any:
    core = CertificationCore(jobs=cfg.jobs).register_defaults()
    try:
        return await COMMANDS[name](cfg, core, echo or print)
    finally:
        await core.shutdown()
