"""
Main entry point for faircert.

    faircert stats    --samples s.csv --loss zeroone --out run/
    faircert certify  --stats run/stats.json --scenario general --rho-start 0.05 --rho-stop 0.5 --rho-step 0.05
    faircert gen      --demo-gaussian 20000 --trials 3000 --seed 7
    faircert validate --sweep run/sweep.csv --trials-csv run/trials.csv
    faircert plot     --sweep run/sweep.csv --trials-csv run/trials.csv

Exit codes: 0 success (infeasible certificates included), 2 input error,
3 internal solver failure.
"""
import argparse
import asyncio
import sys
from pathlib import Path
from typing import List, Optional

from infrastructure.observability import configure_logging, get_logger
from master_core.commands import COMMANDS, run_command
from master_core.run_config import load_run_config
from slices.exceptions import FairCertError, InvalidInputError, SolverFailure

EXIT_OK = 0
EXIT_INPUT = InvalidInputError.exit_code
EXIT_SOLVER = SolverFailure.exit_code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value config file (flags win)")
    common.add_argument("--scenario", choices=["sensitive", "general"])
    common.add_argument("--rho", help="comma-separated radii, e.g. 0.1,0.2")
    common.add_argument("--rho-start", type=float)
    common.add_argument("--rho-stop", type=float)
    common.add_argument("--rho-step", type=float)
    common.add_argument("--granularity", type=int, help="cells per axis T (default 200)")
    common.add_argument("--finite-sampling", action="store_true", default=None)
    common.add_argument("--delta", type=float, help="per-quantity failure probability (default 0.1)")
    common.add_argument("--skew-s", type=float, help="sensitive skew: 0.5-x/2 <= k_s <= 0.5+x/2")
    common.add_argument("--skew-y", type=float, help="label skew: 0.5-x/2 <= r_y <= 0.5+x/2")
    common.add_argument("--stats", type=Path)
    common.add_argument("--samples", type=Path)
    common.add_argument("--S", dest="S", type=int)
    common.add_argument("--C", dest="C", type=int)
    common.add_argument("--loss", choices=["zeroone", "bce", "jsd"])
    common.add_argument("--M", dest="M", type=float, help="loss bound override")
    common.add_argument("--out", type=Path)
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int, help="worker pool size (env FAIRCERT_JOBS)")
    common.add_argument("--trials", type=int, help="number of simulated trials")
    common.add_argument("--demo-gaussian", type=int, metavar="N", help="use N bundled Gaussian-mixture samples")
    common.add_argument("--sweep", type=Path)
    common.add_argument("--trials-csv", type=Path)
    common.add_argument("--tolerance", type=float)
    common.add_argument("--lookup", choices=["linear", "step"])
    common.add_argument("--log-level")

    parser = argparse.ArgumentParser(
        prog="faircert",
        description="faircert - fairness certificates under distribution shift",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(command.__doc__ or "").strip().splitlines()[0])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = load_run_config(flags, args.config)
        configure_logging(cfg.log_level)
        asyncio.run(run_command(args.command, cfg))
    except InvalidInputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SolverFailure as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except FairCertError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:  # noqa: BLE001
        get_logger(__name__).error("unhandled_error", command=args.command, error=str(e))
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
