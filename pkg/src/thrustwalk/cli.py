"""Command-line interface.

    thrustwalk run --config scenario.yaml --out log.csv [--figures]
    thrustwalk validate --config scenario.yaml
    thrustwalk bench [--config scenario.yaml] [--steps N]
    thrustwalk report --csv log.csv [--outdir figs/]

Exit codes: 0 success, 2 configuration error, 3 simulation fault.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, dump_config, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAULT = 3


def _add_config_arg(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument(
        "--config",
        type=Path,
        default=None,
        required=required,
        help="scenario YAML (omit for the built-in nominal scenario)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thrustwalk",
        description="Thruster-assisted quadruped walking simulator and control workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write the telemetry log")
    _add_config_arg(run)
    run.add_argument("--duration", type=float, default=None, help="override duration [s]")
    run.add_argument("--out", type=Path, default=None,
                     help="CSV path (default: the config's output field)")
    run.add_argument("--decimate", type=int, default=None, help="log every Nth step")
    run.add_argument("--full-rate", action="store_true", help="log every step")
    run.add_argument("--seed", type=int, default=None, help="override RNG seed")
    run.add_argument("--figures", action="store_true", help="render report figures after the run")

    val = sub.add_parser("validate", help="check a scenario file and print the effective config")
    _add_config_arg(val)

    ben = sub.add_parser("bench", help="report control-step wall-clock statistics")
    _add_config_arg(ben)
    ben.add_argument("--steps", type=int, default=2000, help="number of steps to time")

    rep = sub.add_parser("report", help="render figures from an existing log")
    rep.add_argument("--csv", type=Path, required=True, help="telemetry log to plot")
    rep.add_argument("--outdir", type=Path, default=None, help="figure directory (default: beside the log)")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    from .simulate import run_scenario

    config = load_config(args.config)
    if args.duration is not None:
        config.duration = args.duration
    if args.decimate is not None:
        config.decimate = args.decimate
    if args.seed is not None:
        config.seed = args.seed
    config.validate()
    out = args.out if args.out is not None else Path(config.output)

    result = run_scenario(config, out_path=out, full_rate=args.full_rate)
    for key in (
        "duration",
        "mean_forward_speed",
        "min_margin",
        "max_friction_excess_x",
        "observer_rms_pct",
        "constrained_rms_pct",
        "mean_step_wall_ms",
    ):
        print(f"{key}: {result.metrics[key]:.6g}")
    print(f"log: {out}")

    if args.figures:
        from .report import render_report

        for path in render_report(out, out.parent):
            print(f"figure: {path}")

    if result.faulted:
        print(f"FAULT: {result.fault.reason} at t={result.fault.t:.4f}s", file=sys.stderr)
        return EXIT_FAULT
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    print(dump_config(config), end="")
    print(f"# config_hash: {config.config_hash()}")
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    from .simulate import bench

    config = load_config(args.config)
    stats = bench(config, steps=args.steps)
    for key, value in stats.items():
        print(f"{key}: {value:.6g}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    from .report import render_report

    for path in render_report(args.csv, args.outdir):
        print(f"figure: {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "validate": _cmd_validate,
        "bench": _cmd_bench,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
