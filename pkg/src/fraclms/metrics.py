"""
Reporting metrics: ensemble MSE curves, normalized weight difference,
steady-state levels and convergence-iteration detection.

Conventions: MSE is a power quantity and uses 10*log10, NWD is an
amplitude ratio and uses 20*log10.  Exact-zero ratios are floored at
-320 dB so reports stay finite and serializable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .simulate import RunSeries

__all__ = [
    "DB_FLOOR",
    "EnsembleReport",
    "nwd_db",
    "ensemble_mse_db",
    "ensemble_nwd_db",
    "steady_state_level",
    "convergence_iteration",
    "build_report",
]

DB_FLOOR = -320.0


@dataclass
class EnsembleReport:
    """Averaged curves plus convergence summaries for one algorithm/SNR cell."""

    mse_db: np.ndarray
    nwd_db: np.ndarray
    steady_mse_db: float
    mse_conv_iter: Optional[int]
    steady_nwd_db: float
    nwd_conv_iter: Optional[int]
    runs_used: int
    runs_diverged: int


def _norm_sq(values) -> float:
    acc = 0.0
    for v in values:
        fv = float(v)
        acc += fv * fv
    return acc


def nwd_db(estimated, truth) -> float:
    """Normalized weight difference in dB: 20*log10(||truth - est|| / ||truth||)."""
    t = np.asarray(truth, dtype=float)
    e = np.asarray(estimated, dtype=float)
    if t.shape != e.shape:
        raise ValueError(f"length mismatch: estimated {e.shape} vs truth {t.shape}")
    tnorm2 = _norm_sq(t)
    if tnorm2 == 0.0:
        raise ValueError("truth vector must be nonzero")
    dnorm2 = _norm_sq(t - e)
    if dnorm2 == 0.0:
        return DB_FLOOR
    return max(10.0 * math.log10(dnorm2 / tnorm2), DB_FLOOR)


def ensemble_mse_db(runs: Sequence["RunSeries"]) -> np.ndarray:
    """Per-iteration mean of e**2 across runs, in dB.

    Summation follows the given run order so the result is deterministic.
    """
    if len(runs) == 0:
        raise ValueError("empty ensemble: no runs to average")
    n = len(runs[0].squared_error)
    acc = np.zeros(n)
    for r in runs:
        if len(r.squared_error) != n:
            raise ValueError("all runs must have the same length")
        acc += r.squared_error
    mean = acc / len(runs)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(mean)
    return np.maximum(out, DB_FLOOR)


def ensemble_nwd_db(runs: Sequence["RunSeries"]) -> np.ndarray:
    """Per-iteration mean of the per-run NWD curves (already in dB)."""
    if len(runs) == 0:
        raise ValueError("empty ensemble: no runs to average")
    n = len(runs[0].nwd_db)
    acc = np.zeros(n)
    for r in runs:
        if len(r.nwd_db) != n:
            raise ValueError("all runs must have the same length")
        acc += r.nwd_db
    return acc / len(runs)


def steady_state_level(curve_db, tail_fraction: float = 0.25) -> float:
    """Mean of the last ceil(tail_fraction * N) entries of a dB curve."""
    c = np.asarray(curve_db, dtype=float)
    if c.size == 0:
        raise ValueError("empty curve")
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    k = math.ceil(tail_fraction * c.size)
    return float(np.mean(c[c.size - k:]))


def convergence_iteration(curve_db, steady_db: float, margin_db: float = 1.0) -> Optional[int]:
    """Smallest n with curve[m] <= steady_db + margin_db for every m >= n.

    Returns None when even the final sample sits above the threshold.
    """
    if margin_db <= 0.0:
        raise ValueError(f"margin_db must be > 0, got {margin_db}")
    c = np.asarray(curve_db, dtype=float)
    above = np.nonzero(c > steady_db + margin_db)[0]
    if above.size == 0:
        return 0
    n = int(above[-1]) + 1
    return n if n < c.size else None


def build_report(
    runs: Sequence["RunSeries"],
    runs_diverged: int = 0,
    tail_fraction: float = 0.25,
    margin_db: float = 1.0,
) -> EnsembleReport:
    """Aggregate non-diverged runs into an EnsembleReport."""
    mse = ensemble_mse_db(runs)
    nwd = ensemble_nwd_db(runs)
    s_mse = steady_state_level(mse, tail_fraction)
    s_nwd = steady_state_level(nwd, tail_fraction)
    return EnsembleReport(
        mse_db=mse,
        nwd_db=nwd,
        steady_mse_db=s_mse,
        mse_conv_iter=convergence_iteration(mse, s_mse, margin_db),
        steady_nwd_db=s_nwd,
        nwd_conv_iter=convergence_iteration(nwd, s_nwd, margin_db),
        runs_used=len(runs),
        runs_diverged=runs_diverged,
    )
