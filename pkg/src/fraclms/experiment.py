"""
Experiment runner: executes the SNR x algorithm grid, writes CSV curves,
a summary table, SVG plots and a JSON manifest, and checks summaries
against a reference table.

All files are written with deterministic bytes for a fixed (config, seed),
except the manifest, which carries a timestamp.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from . import __version__
from .configfile import ConfigError, dumps, load
from .metrics import EnsembleReport, build_report
from .simulate import (
    ROLE_DISTURBANCE,
    ROLE_INPUT,
    ExperimentConfig,
    clean_plant_power,
    run_ensemble,
    run_identification,
    snr_to_variance,
    stream,
)
from .plotting import emit_plot

__all__ = [
    "LABELS",
    "SUMMARY_FIELDS",
    "FormatError",
    "ExperimentManifest",
    "CellCheck",
    "ComparisonReport",
    "run_experiment",
    "read_summary",
    "read_reference",
    "compare_to_reference",
]

LABELS = {"lms": "LMS", "flms": "FLMS", "rvss-flms": "RVSS-FLMS"}

SUMMARY_FIELDS = (
    "algorithm",
    "snr_db",
    "steady_mse_db",
    "mse_conv_iter",
    "steady_nwd_db",
    "nwd_conv_iter",
    "runs_used",
    "runs_diverged",
)

REFERENCE_FIELDS = (
    "algorithm",
    "snr_db",
    "mse_conv_iter",
    "steady_mse_db",
    "nwd_conv_iter",
    "steady_nwd_db",
    "time_s",
)


class FormatError(ValueError):
    """A summary or reference file does not match the expected schema."""


@dataclass
class ExperimentManifest:
    """What an experiment produced: effective config, artifacts, provenance."""

    config_text: str
    artifact_paths: dict
    software_version: str
    timestamp: str
    bench_seconds: Optional[dict] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def _fmt_float(v: float) -> str:
    return repr(float(v))


def _fmt_iter(v: Optional[int]) -> str:
    return "none" if v is None else str(v)


def _snr_tag(snr: float) -> str:
    return f"{snr:g}dB"


def _run_cell(args) -> tuple[list, int]:
    algo_name, fcfg, plant, n_samples, runs, seed = args
    return run_ensemble(algo_name, fcfg, plant, n_samples, runs, seed)


def run_experiment(
    config,
    out_dir,
    seed: Optional[int] = None,
    runs: Optional[int] = None,
    parallel: int = 1,
    bench: bool = False,
) -> ExperimentManifest:
    """Run the full grid described by a config (path or ExperimentConfig).

    Writes, under out_dir: one curves CSV per (algorithm, SNR) cell, one
    MSE and one NWD SVG per SNR, summary.csv, and manifest.json (last).
    Diverged runs are excluded from averages and counted per cell.
    """
    if not isinstance(config, ExperimentConfig):
        config = load(config)
    if seed is not None:
        config = replace(config, rng_seed=seed)
    if runs is not None:
        config = replace(config, monte_carlo_runs=runs)
    bad = config.violations()
    if bad:
        raise ConfigError(bad)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    power = clean_plant_power(config.plant.coeffs)
    cells = []
    for spec in config.algorithms:
        for snr in config.snr_db_list:
            plant = replace(config.plant, disturbance_variance=snr_to_variance(snr, power))
            cells.append(
                (
                    (spec.name, snr),
                    (
                        spec.name,
                        spec.filter,
                        plant,
                        config.samples_per_run,
                        config.monte_carlo_runs,
                        config.rng_seed,
                    ),
                )
            )

    results: dict[tuple[str, float], tuple[list, int]] = {}
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            for (key, _), cell_result in zip(cells, pool.map(_run_cell, [a for _, a in cells])):
                results[key] = cell_result
    else:
        for key, args in cells:
            results[key] = _run_cell(args)

    reports: dict[tuple[str, float], EnsembleReport] = {}
    artifact_paths: dict = {"curves": {}, "plots": {}, "summary": "summary.csv"}
    for (name, snr), (series, diverged) in results.items():
        report = build_report(series, runs_diverged=diverged)
        reports[(name, snr)] = report
        fname = f"{name}_{_snr_tag(snr)}.csv"
        _write_curves(out / fname, report)
        artifact_paths["curves"][f"{name}@{_snr_tag(snr)}"] = fname

    for snr in config.snr_db_list:
        per_algo = {LABELS[s.name]: reports[(s.name, snr)] for s in config.algorithms}
        for kind in ("mse", "nwd"):
            fname = f"{kind}_{_snr_tag(snr)}.svg"
            emit_plot(per_algo, out / fname, kind)
            artifact_paths["plots"][f"{kind}@{_snr_tag(snr)}"] = fname

    _write_summary(out / "summary.csv", config, reports)

    bench_seconds = None
    if bench:
        bench_seconds = _bench(config)
        for name, secs in bench_seconds.items():
            print(f"bench: {LABELS[name]} 200 iterations in {secs:.4f} s")

    manifest = ExperimentManifest(
        config_text=dumps(config),
        artifact_paths=artifact_paths,
        software_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
        bench_seconds=bench_seconds,
    )
    (out / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    return manifest


def _write_curves(path: Path, report: EnsembleReport) -> None:
    buf = io.StringIO()
    buf.write("iteration,mse_db,nwd_db\n")
    for i in range(len(report.mse_db)):
        buf.write(f"{i},{_fmt_float(report.mse_db[i])},{_fmt_float(report.nwd_db[i])}\n")
    path.write_text(buf.getvalue(), encoding="utf-8")


def _write_summary(path: Path, config: ExperimentConfig, reports) -> None:
    buf = io.StringIO()
    buf.write(",".join(SUMMARY_FIELDS) + "\n")
    for name, snr in sorted(reports):
        r = reports[(name, snr)]
        row = (
            LABELS[name],
            f"{snr:g}",
            _fmt_float(r.steady_mse_db),
            _fmt_iter(r.mse_conv_iter),
            _fmt_float(r.steady_nwd_db),
            _fmt_iter(r.nwd_conv_iter),
            str(r.runs_used),
            str(r.runs_diverged),
        )
        buf.write(",".join(row) + "\n")
    path.write_text(buf.getvalue(), encoding="utf-8")


def _bench(config: ExperimentConfig, iterations: int = 200) -> dict[str, float]:
    """Informative single-run training time per algorithm; never a pass/fail input."""
    power = clean_plant_power(config.plant.coeffs)
    plant = replace(
        config.plant,
        disturbance_variance=snr_to_variance(config.snr_db_list[0], power),
    )
    out = {}
    for spec in config.algorithms:
        t0 = time.perf_counter()
        run_identification(
            spec.name,
            spec.filter,
            plant,
            iterations,
            input_rng=stream(config.rng_seed, 0, ROLE_INPUT),
            disturbance_rng=stream(config.rng_seed, 0, ROLE_DISTURBANCE),
        )
        out[spec.name] = time.perf_counter() - t0
    return out


def _parse_iter_field(text: str, where: str) -> Optional[int]:
    if text == "none":
        return None
    try:
        return int(text)
    except ValueError as exc:
        raise FormatError(f"{where}: bad iteration count {text!r}") from exc


def _read_table(path, fields, kind: str) -> list[dict]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        got = tuple(reader.fieldnames or ())
        if got != tuple(fields):
            raise FormatError(f"{path} is not a {kind} file: header {got} != {tuple(fields)}")
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            row = {"algorithm": raw["algorithm"]}
            where = f"{path}:{lineno}"
            try:
                row["snr_db"] = float(raw["snr_db"])
                row["steady_mse_db"] = float(raw["steady_mse_db"])
                row["steady_nwd_db"] = float(raw["steady_nwd_db"])
            except (TypeError, ValueError) as exc:
                raise FormatError(f"{where}: bad numeric field: {exc}") from exc
            row["mse_conv_iter"] = _parse_iter_field(raw["mse_conv_iter"], where)
            row["nwd_conv_iter"] = _parse_iter_field(raw["nwd_conv_iter"], where)
            for extra in ("runs_used", "runs_diverged"):
                if extra in raw:
                    try:
                        row[extra] = int(raw[extra])
                    except ValueError as exc:
                        raise FormatError(f"{where}: bad run count {raw[extra]!r}") from exc
            rows.append(row)
    return rows


def read_summary(path) -> list[dict]:
    """Parse a summary.csv written by run_experiment."""
    return _read_table(path, SUMMARY_FIELDS, "summary")


def read_reference(path) -> list[dict]:
    """Parse a reference table (same cells plus a timing column)."""
    return _read_table(path, REFERENCE_FIELDS, "reference")


@dataclass
class CellCheck:
    algorithm: str
    snr_db: float
    quantity: str
    observed: object
    reference: object
    passed: bool
    detail: str


@dataclass
class ComparisonReport:
    cells: list[CellCheck]
    passed: bool
    nwd_offset_db: dict[str, float]
    mse_tol_db: float
    iter_factor: float


def compare_to_reference(
    summary_path, reference_path, mse_tol_db: float = 0.5, iter_factor: float = 2.0
) -> ComparisonReport:
    """Per-cell verdicts of a summary against a reference table.

    Steady-state MSE and NWD levels must agree within +-mse_tol_db;
    convergence iterations within a multiplicative iter_factor.  Only
    (algorithm, SNR) pairs present in both files are compared; the timing
    column of the reference is ignored.  The mean observed-minus-reference
    NWD level difference per algorithm is reported alongside the verdicts.
    """
    summary = {(r["algorithm"], r["snr_db"]): r for r in read_summary(summary_path)}
    reference = {(r["algorithm"], r["snr_db"]): r for r in read_reference(reference_path)}

    cells: list[CellCheck] = []
    nwd_diffs: dict[str, list[float]] = {}
    for key in sorted(summary):
        if key not in reference:
            continue
        ours, ref = summary[key], reference[key]
        algo, snr = key
        for quantity in ("steady_mse_db", "steady_nwd_db"):
            diff = ours[quantity] - ref[quantity]
            cells.append(
                CellCheck(
                    algorithm=algo,
                    snr_db=snr,
                    quantity=quantity,
                    observed=ours[quantity],
                    reference=ref[quantity],
                    passed=abs(diff) <= mse_tol_db,
                    detail=f"diff {diff:+.2f} dB vs tolerance +-{mse_tol_db:g} dB",
                )
            )
            if quantity == "steady_nwd_db":
                nwd_diffs.setdefault(algo, []).append(diff)
        for quantity in ("mse_conv_iter", "nwd_conv_iter"):
            obs, refv = ours[quantity], ref[quantity]
            if obs is None or refv is None:
                ok = obs is refv
                detail = f"observed {obs} vs reference {refv}"
            else:
                ok = refv / iter_factor <= obs <= refv * iter_factor
                detail = f"observed {obs} vs reference {refv} (factor {iter_factor:g})"
            cells.append(
                CellCheck(
                    algorithm=algo,
                    snr_db=snr,
                    quantity=quantity,
                    observed=obs,
                    reference=refv,
                    passed=ok,
                    detail=detail,
                )
            )

    offsets = {algo: sum(d) / len(d) for algo, d in sorted(nwd_diffs.items())}
    return ComparisonReport(
        cells=cells,
        passed=all(c.passed for c in cells) and bool(cells),
        nwd_offset_db=offsets,
        mse_tol_db=mse_tol_db,
        iter_factor=iter_factor,
    )
