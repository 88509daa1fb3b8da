"""Command-line entry point.

Subcommands map onto the runners:

    sim run    --scenario fig4 --out DIR [--set params.omega2_over_omega1=3.85]
    sim sweep  --scenario fig6 --out DIR [--set sweep.0.count=5]
    sim nscale --config FILE  [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .dynamics import ConvergenceError, DegenerateSteadyStateError, PropagationError
from .scenarios import (
    ConfigError,
    SCENARIO_NAMES,
    load_config,
    run_nscaling,
    run_scenario,
    run_sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_NUMERICAL_ERRORS = (
    PropagationError,
    ConvergenceError,
    DegenerateSteadyStateError,
    FloatingPointError,
    np.linalg.LinAlgError,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", choices=SCENARIO_NAMES,
                        help="named scenario providing parameter defaults")
    parser.add_argument("--config", metavar="FILE",
                        help="JSON config file merged over the scenario defaults")
    parser.add_argument("--out", metavar="DIR", default=None,
                        help="output directory (timeseries.csv / grid.csv + run.json)")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="PATH=VALUE",
                        help="dotted-path config override, repeatable")
    parser.add_argument("--workers", type=int, default=None,
                        help="concurrent sweep workers (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="Driven-dissipative Rydberg pair simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (("run", "single time-series scenario"),
                      ("sweep", "parameter-grid sweep"),
                      ("nscale", "principal-quantum-number scan")):
        _add_common(sub.add_parser(name, help=doc))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.scenario, args.config, args.overrides)
        if args.workers is not None:
            cfg["workers"] = args.workers
        if args.out is None:
            print("note: no --out directory given; results are not written",
                  file=sys.stderr)
        if args.command == "run":
            series = run_scenario(cfg, args.out)
            final = {k: v[-1] for k, v in series.columns.items() if k != "stage"}
            summary = ", ".join(f"{k}={v:.6g}" for k, v in final.items())
            print(f"{cfg['scenario']}: t={series.times[-1]:.6g} us, {summary}")
        elif args.command == "sweep":
            grid = run_sweep(cfg, args.out)
            failed = sum(1 for c in grid.cells if c.get("error"))
            print(f"{cfg['scenario']}: {len(grid.cells)} cells, {failed} failed")
            if failed:
                return EXIT_NUMERICAL
        elif args.command == "nscale":
            grid = run_nscaling(cfg, args.out)
            for cell in grid.cells:
                print(f"n={cell['n']}: fidelity={cell['fidelity']:.6g} "
                      f"purity={cell['purity']:.6g} (t={cell['t_final']:.6g} us)")
            if any(c.get("error") for c in grid.cells):
                return EXIT_NUMERICAL
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
