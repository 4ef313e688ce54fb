"""Command-line entry point: ``cfcluster run | complexity | check``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import complexity
from .checks import run_checks
from .config import PRESETS
from .exceptions import ConfigError, SimulationError
from .harness import ExperimentPlan, run
from .io import utc_now, format_grid, parse_grid, plan_from_mapping, read_config, write_complexity, write_results

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_IO = 4


def _csv_list(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--preset", choices=sorted(PRESETS),
                        help="setup/realization counts and cluster grids")
    common.add_argument("--arch", type=_csv_list,
                        help="comma list of centralized, distributed, cluster")
    common.add_argument("--precoder", type=_csv_list, help="comma list of mr, mmse")
    common.add_argument("--grid", action="append", type=parse_grid,
                        help="cluster grid ROWSxCOLS; repeat for several")
    common.add_argument("--setups", type=int)
    common.add_argument("--realizations", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, default=1, help="parallel setup workers")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cfcluster",
                                     description="Cluster-based cell-free massive MIMO downlink simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="full Monte Carlo experiment")
    cp = sub.add_parser("complexity", parents=[common], help="MMSE complexity table only")
    cp.add_argument("--clusters", type=lambda s: [int(v) for v in _csv_list(s)],
                    default=[1, 2, 4, 8, 16], help="comma list of cluster counts")
    sub.add_parser("check", parents=[common], help="invariant and degeneracy self-checks")
    return parser


def resolve_plan(args) -> ExperimentPlan:
    """Defaults, then preset, then config file, then explicit flags."""
    base = ExperimentPlan.from_preset(args.preset) if args.preset else ExperimentPlan()
    values, lines = {}, {}
    if args.config:
        for key, (value, line) in read_config(args.config).items():
            values[key] = value
            lines[key] = line
    flags = {
        "architectures": [{"cluster-based": "cluster"}.get(a, a) for a in args.arch] if args.arch else None,
        "precoders": args.precoder,
        "cluster_grids": args.grid,
        "n_setups": args.setups,
        "n_realizations": args.realizations,
        "seed": args.seed,
    }
    for key, value in flags.items():
        if value is not None:
            values[key] = value
            lines.pop(key, None)
    return plan_from_mapping(values, base, lines)


def _cmd_run(args, plan):
    started = utc_now()
    result = run(plan, workers=args.workers)
    out = args.out or "results"
    manifest = write_results(result, out, started=started)
    for key in plan.keys():
        rep = result.reports[key]
        print(f"{key[0]:>12s} {key[1]:>5s} {format_grid(key[2]):>5s}  "
              f"median={rep.median:8.4f}  mean={rep.mean:8.4f}  p10={rep.percentile(10):8.4f}")
    print(f"wrote {len(manifest.files)} files to {out}")
    return EXIT_OK


def _cmd_complexity(args, plan):
    cfg = plan.cfg
    reports = complexity.ratio_table(cfg.n_antennas, cfg.n_aps, cfg.n_ues, args.clusters)
    table = complexity.format_table(reports)
    sys.stdout.write(table)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_complexity(reports, os.path.join(args.out, "complexity.csv"))
    return EXIT_OK


def _cmd_check(args, plan):
    failed = 0
    for res in run_checks():
        print(f"{'PASS' if res.passed else 'FAIL'}  {res.name}: {res.detail}")
        failed += not res.passed
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        plan = resolve_plan(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handler = {"run": _cmd_run, "complexity": _cmd_complexity, "check": _cmd_check}[args.command]
    try:
        return handler(args, plan)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
