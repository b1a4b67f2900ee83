"""
System-identification simulation: BPSK excitation, FIR plant with additive
Gaussian disturbance, and the sample-by-sample identification loop.

Randomness is organized as named streams: every (run index, role) pair gets
an independent generator derived from (seed, run, role), so Monte-Carlo
runs are order-independent and the input / disturbance draws of a run are
shared across algorithms (common random numbers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .filters import (
    DivergedError,
    FilterConfig,
    Regressor,
    flms_step,
    initial_state,
    rvss_flms_step,
)
from .metrics import nwd_db

__all__ = [
    "ALGORITHMS",
    "ROLE_INPUT",
    "ROLE_DISTURBANCE",
    "PlantSpec",
    "AlgorithmSpec",
    "ExperimentConfig",
    "RunSeries",
    "stream",
    "bpsk_sequence",
    "clean_plant_power",
    "snr_to_variance",
    "plant_output",
    "run_identification",
    "run_ensemble",
]

ALGORITHMS = ("lms", "flms", "rvss-flms")

ROLE_INPUT = 0
ROLE_DISTURBANCE = 1


@dataclass(frozen=True)
class PlantSpec:
    """True system: FIR coefficients plus disturbance variance."""

    coeffs: tuple[float, ...]
    disturbance_variance: float = 0.0

    def violations(self) -> list[str]:
        bad = []
        if len(self.coeffs) == 0:
            bad.append("plant coeffs must be non-empty")
        elif not all(math.isfinite(c) for c in self.coeffs):
            bad.append(f"plant coeffs must be finite, got {self.coeffs}")
        if not (math.isfinite(self.disturbance_variance) and self.disturbance_variance >= 0.0):
            bad.append(f"disturbance_variance must be >= 0, got {self.disturbance_variance}")
        return bad


@dataclass(frozen=True)
class AlgorithmSpec:
    """One algorithm under test: its name and filter hyperparameters."""

    name: str
    filter: FilterConfig


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one benchmark experiment."""

    plant: PlantSpec
    snr_db_list: tuple[float, ...]
    samples_per_run: int
    monte_carlo_runs: int
    rng_seed: int
    algorithms: tuple[AlgorithmSpec, ...]

    def violations(self) -> list[str]:
        bad = self.plant.violations()
        if len(self.snr_db_list) == 0:
            bad.append("snr_db list must be non-empty")
        elif not all(math.isfinite(s) for s in self.snr_db_list):
            bad.append(f"snr_db values must be finite, got {self.snr_db_list}")
        if self.monte_carlo_runs < 1:
            bad.append(f"monte_carlo_runs must be >= 1, got {self.monte_carlo_runs}")
        if not 0 <= self.rng_seed < 2**64:
            bad.append(f"rng_seed must be a 64-bit unsigned integer, got {self.rng_seed}")
        if len(self.algorithms) == 0:
            bad.append("algorithms list must be non-empty")
        seen = set()
        for spec in self.algorithms:
            if spec.name not in ALGORITHMS:
                bad.append(f"unknown algorithm {spec.name!r}; expected one of {ALGORITHMS}")
                continue
            if spec.name in seen:
                bad.append(f"algorithm {spec.name!r} listed twice")
            seen.add(spec.name)
            for v in spec.filter.violations():
                bad.append(f"[{spec.name}] {v}")
            if self.samples_per_run < spec.filter.tap_count:
                bad.append(
                    f"[{spec.name}] samples_per_run must be >= tap_count, "
                    f"got {self.samples_per_run} < {spec.filter.tap_count}"
                )
            if spec.filter.tap_count != len(self.plant.coeffs):
                bad.append(
                    f"[{spec.name}] tap_count {spec.filter.tap_count} does not match "
                    f"plant order {len(self.plant.coeffs)}"
                )
        return bad


@dataclass
class RunSeries:
    """Per-iteration traces of one identification run."""

    squared_error: np.ndarray
    nwd_db: np.ndarray


def stream(seed: int, run_index: int, role: int) -> np.random.Generator:
    """Independent generator for one (run, role) pair under a master seed."""
    return np.random.default_rng(np.random.SeedSequence((seed, run_index, role)))


def bpsk_sequence(n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Equiprobable i.i.d. +-1 sequence drawn from the given stream."""
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    return rng.integers(0, 2, n_samples) * 2.0 - 1.0


def clean_plant_power(coeffs) -> float:
    """Output power of the FIR plant under unit-power uncorrelated +-1 input."""
    return float(sum(float(c) * float(c) for c in coeffs))


def snr_to_variance(snr_db: float, signal_power: float) -> float:
    """Disturbance variance that realizes the requested output SNR."""
    if not signal_power > 0.0:
        raise ValueError(f"signal_power must be > 0, got {signal_power}")
    return signal_power / 10.0 ** (snr_db / 10.0)


def plant_output(x_window: Regressor, spec: PlantSpec, rng: np.random.Generator) -> float:
    """One noisy plant sample: coeffs . window + N(0, disturbance_variance)."""
    taps = x_window.taps
    if len(spec.coeffs) != len(taps):
        raise ValueError(f"window length {len(taps)} does not match plant order {len(spec.coeffs)}")
    acc = 0.0
    for i, c in enumerate(spec.coeffs):
        acc += c * float(taps[i])
    return acc + float(rng.standard_normal()) * math.sqrt(spec.disturbance_variance)


def _dispatch(algorithm: str, cfg: FilterConfig):
    if algorithm == "lms":
        # plain LMS is the fractional update with the fractional term off
        return flms_step, replace(cfg, nu_f_init=0.0)
    if algorithm == "flms":
        return flms_step, cfg
    if algorithm == "rvss-flms":
        return rvss_flms_step, cfg
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def run_identification(
    algorithm: str,
    cfg: FilterConfig,
    plant: PlantSpec,
    n_samples: int,
    input_rng: np.random.Generator,
    disturbance_rng: np.random.Generator | None = None,
) -> RunSeries:
    """Drive one filter through the identification loop, sample by sample.

    The regressor window uses zero prehistory for the first tap_count - 1
    samples.  Records squared prediction error and the NWD of the weights
    against the plant coefficients after every update.  A non-finite state
    raises :class:`~fraclms.filters.DivergedError` with the iteration index.
    """
    step_fn, step_cfg = _dispatch(algorithm, cfg)
    k = cfg.tap_count
    if len(plant.coeffs) != k:
        raise ValueError(f"tap_count {k} does not match plant order {len(plant.coeffs)}")
    d_rng = disturbance_rng if disturbance_rng is not None else input_rng

    x = bpsk_sequence(n_samples, input_rng)
    padded = np.concatenate([np.zeros(k - 1), x])
    truth = np.asarray(plant.coeffs, dtype=float)

    state = initial_state(cfg)
    e2 = np.empty(n_samples)
    nwd = np.empty(n_samples)
    for n in range(n_samples):
        reg = Regressor(padded[n : n + k][::-1])
        desired = plant_output(reg, plant, d_rng)
        state, err = step_fn(state, reg, desired, step_cfg)
        sq = err * err
        val = nwd_db(state.weights, truth)
        if not (math.isfinite(sq) and math.isfinite(val)):
            # the error or weight magnitude overflowed the recorded traces
            raise DivergedError(n)
        e2[n] = sq
        nwd[n] = val
    return RunSeries(squared_error=e2, nwd_db=nwd)


def run_ensemble(
    algorithm: str,
    cfg: FilterConfig,
    plant: PlantSpec,
    n_samples: int,
    monte_carlo_runs: int,
    seed: int,
) -> tuple[list[RunSeries], int]:
    """Execute an ensemble of independent runs.

    Diverged runs are dropped from the returned list and counted; every
    run r draws its input and disturbance from streams derived from
    (seed, r, role) regardless of algorithm, so different algorithms see
    identical signals.
    """
    series: list[RunSeries] = []
    diverged = 0
    for r in range(monte_carlo_runs):
        try:
            series.append(
                run_identification(
                    algorithm,
                    cfg,
                    plant,
                    n_samples,
                    input_rng=stream(seed, r, ROLE_INPUT),
                    disturbance_rng=stream(seed, r, ROLE_DISTURBANCE),
                )
            )
        except DivergedError:
            diverged += 1
    return series, diverged
