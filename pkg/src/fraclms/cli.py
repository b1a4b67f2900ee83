"""Command-line experiment runner and result checker."""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from .configfile import ConfigError, bundled_path
from .experiment import FormatError, compare_to_reference, read_summary, run_experiment
from .plotting import plot_curves


def _color_enabled() -> bool:
    return os.environ.get("NO_COLOR") is None and sys.stdout.isatty()


def _verdict(passed: bool) -> str:
    word = "PASS" if passed else "FAIL"
    if _color_enabled():
        code = "32" if passed else "31"
        return f"\x1b[{code}m{word}\x1b[0m"
    return word


def _resolve_input(path_str: str) -> Path:
    """Use the named file, falling back to a bundled data file of that name."""
    path = Path(path_str)
    if path.exists():
        return path
    try:
        bundled = bundled_path(path_str)
    except (FileNotFoundError, ModuleNotFoundError):
        return path
    if bundled.exists():
        print(f"note: using bundled {path_str}")
        return bundled
    return path


def _cmd_run(args) -> int:
    try:
        run_experiment(
            _resolve_input(args.config),
            args.out,
            seed=args.seed,
            runs=args.runs,
            parallel=args.parallel,
            bench=args.bench,
        )
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"aborted, output may be partial (no manifest written): {exc}", file=sys.stderr)
        return 2
    for row in read_summary(Path(args.out) / "summary.csv"):
        print(
            f"{row['algorithm']:>9}  {row['snr_db']:>5g} dB  "
            f"mse {row['steady_mse_db']:8.2f} dB @ {str(row['mse_conv_iter']):>4}  "
            f"nwd {row['steady_nwd_db']:8.2f} dB @ {str(row['nwd_conv_iter']):>4}  "
            f"runs {row['runs_used']} (+{row['runs_diverged']} diverged)"
        )
    print(f"artifacts written to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    try:
        report = compare_to_reference(
            args.summary,
            _resolve_input(args.reference),
            mse_tol_db=args.mse_tol,
            iter_factor=args.iter_factor,
        )
    except (FormatError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    for c in report.cells:
        print(
            f"{_verdict(c.passed)}  {c.algorithm:>9} @ {c.snr_db:g} dB  "
            f"{c.quantity:<14} {c.detail}"
        )
    for algo, off in report.nwd_offset_db.items():
        print(f"note: mean NWD offset for {algo}: {off:+.2f} dB (observed - reference)")
    print(f"overall: {_verdict(report.passed)}")
    return 0 if report.passed else 1


def _read_curve(path: Path, column: str) -> np.ndarray:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise FormatError(f"{path} has no column {column!r}")
        return np.array([float(row[column]) for row in reader])


def _cmd_plot(args) -> int:
    column = {"mse": "mse_db", "nwd": "nwd_db"}[args.kind]
    try:
        curves = {Path(p).stem: _read_curve(Path(p), column) for p in args.curves}
        plot_curves(curves, args.out, ylabel=f"{args.kind.upper()} (dB)")
    except (FormatError, OSError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraclms",
        description="Adaptive-filter system-identification benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the SNR x algorithm experiment grid")
    p_run.add_argument("config", help="config file (or bundled name, e.g. paper.config)")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override rng_seed")
    p_run.add_argument("--runs", type=int, default=None, help="override monte_carlo_runs")
    p_run.add_argument("--parallel", type=int, default=1, help="worker processes for grid cells")
    p_run.add_argument("--bench", action="store_true", help="report per-algorithm training time")
    p_run.set_defaults(fn=_cmd_run)

    p_ver = sub.add_parser("verify", help="check a summary.csv against a reference table")
    p_ver.add_argument("summary")
    p_ver.add_argument("--reference", required=True, help="reference table (or bundled name)")
    p_ver.add_argument("--mse-tol", type=float, default=0.5, help="dB tolerance on steady-state levels")
    p_ver.add_argument("--iter-factor", type=float, default=2.0, help="allowed factor on convergence iterations")
    p_ver.set_defaults(fn=_cmd_verify)

    p_plot = sub.add_parser("plot", help="plot curves CSV files as one SVG chart")
    p_plot.add_argument("curves", nargs="+", help="curves CSV files from a run")
    p_plot.add_argument("--kind", choices=("mse", "nwd"), required=True)
    p_plot.add_argument("--out", required=True, help="output SVG path")
    p_plot.set_defaults(fn=_cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
