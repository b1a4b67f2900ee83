"""
Adaptive filter cores: LMS, FLMS and RVSS-FLMS
==============================================

Single-sample weight updates for the least mean square family of adaptive
filters.  The fractional LMS (FLMS) augments the usual stochastic-gradient
update with a fractional-order gradient term; RVSS-FLMS additionally drives
the step size from a low-pass filtered error autocorrelation (see
:mod:`fraclms.stepsize`).

All operations are pure: they take a state and return a new state, so
independent filter instances can be advanced in parallel.  A single state
must only be advanced one step at a time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .stepsize import update_correlation, update_step_size

__all__ = [
    "FracPowerPolicy",
    "FilterConfig",
    "FilterState",
    "Regressor",
    "DivergedError",
    "cost",
    "predict",
    "integer_gradient",
    "frac_power",
    "fractional_gradient",
    "gamma",
    "flms_step",
    "rvss_flms_step",
    "initial_state",
]


class FracPowerPolicy(enum.Enum):
    """How w**(1-f) is evaluated for non-positive weights.

    Real powers of negative bases are undefined for non-integer exponents,
    but adaptive weights routinely go negative.  SIGNED_MAGNITUDE uses
    sign(w)*|w|**a, which keeps the update odd in w; MAGNITUDE_ONLY uses
    |w|**a.  Both map w=0 to 0.
    """

    SIGNED_MAGNITUDE = "signed_magnitude"
    MAGNITUDE_ONLY = "magnitude_only"


class DivergedError(RuntimeError):
    """A filter update produced a non-finite weight, error or step size."""

    def __init__(self, iteration: int, detail: str = "non-finite filter state"):
        self.iteration = iteration
        super().__init__(f"{detail} at iteration {iteration}")


@dataclass(frozen=True)
class FilterConfig:
    """Static hyperparameters of one adaptive filter instance.

    Attributes
    ----------
    tap_count : int
        Number of adaptive weights.
    frac_order : float
        Fractional derivative order f, 0 < f < 1.
    nu_init : float
        Initial step size.  FLMS and plain LMS keep it constant.
    nu_f_init : float
        Step size of the fractional gradient term (FLMS only; plain LMS
        is FLMS with nu_f_init = 0).
    nu_min, nu_max : float
        Clamp bounds for the RVSS step-size recursion.
    alpha : float
        Forgetting factor of the error-energy correlation, 0 < alpha < 1.
    beta : float
        Geometric step-size decay factor, 0 < beta < 1.
    gamma : float
        Gain on the squared error-energy correlation, > 0.
    frac_power_policy : FracPowerPolicy
        Evaluation rule for w**(1-f) at non-positive weights.
    weight_init : float
        Initial value of every tap weight.
    """

    tap_count: int
    frac_order: float
    nu_init: float
    nu_f_init: float
    nu_min: float
    nu_max: float
    alpha: float
    beta: float
    gamma: float
    frac_power_policy: FracPowerPolicy = FracPowerPolicy.SIGNED_MAGNITUDE
    weight_init: float = 0.0

    def violations(self) -> list[str]:
        """Return a description of every violated invariant (empty if valid)."""
        bad = []
        if self.tap_count < 1:
            bad.append(f"tap_count must be >= 1, got {self.tap_count}")
        if not 0.0 < self.frac_order < 1.0:
            bad.append(f"frac_order must lie in (0, 1), got {self.frac_order}")
        if not self.nu_min > 0.0:
            bad.append(f"nu_min must be > 0, got {self.nu_min}")
        if not self.nu_max > self.nu_min:
            bad.append(f"nu_max must exceed nu_min, got nu_max={self.nu_max} <= nu_min={self.nu_min}")
        elif not self.nu_min <= self.nu_init <= self.nu_max:
            bad.append(f"nu_init must lie in [nu_min, nu_max], got {self.nu_init}")
        if not 0.0 < self.alpha < 1.0:
            bad.append(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            bad.append(f"beta must lie in (0, 1), got {self.beta}")
        if not self.gamma > 0.0:
            bad.append(f"gamma must be > 0, got {self.gamma}")
        if not math.isfinite(self.weight_init):
            bad.append(f"weight_init must be finite, got {self.weight_init}")
        return bad


@dataclass(slots=True)
class FilterState:
    """Mutable per-run state: weights, step size, error correlation."""

    weights: np.ndarray
    nu: float
    p: float
    prev_error: float
    iteration: int = 0


@dataclass(slots=True)
class Regressor:
    """Tap-delay window of recent inputs, most recent first."""

    taps: np.ndarray


def initial_state(cfg: FilterConfig) -> FilterState:
    """Fresh state: all weights at weight_init, nu at nu_init, no history."""
    w = np.full(cfg.tap_count, float(cfg.weight_init))
    return FilterState(weights=w, nu=float(cfg.nu_init), p=0.0, prev_error=0.0, iteration=0)


def cost(error: float) -> float:
    """Instantaneous quadratic cost, error**2 / 2."""
    return 0.5 * error * error


def predict(state: FilterState, reg: Regressor) -> float:
    """Filter output: inner product of the weights with the regressor.

    Accumulates in tap order so results are bit-reproducible against any
    plain sequential implementation.
    """
    w = state.weights
    x = reg.taps
    if len(w) != len(x):
        raise ValueError(f"regressor length {len(x)} does not match tap count {len(w)}")
    acc = 0.0
    for i in range(len(w)):
        acc += float(w[i]) * float(x[i])
    return acc


def integer_gradient(error: float, reg: Regressor) -> np.ndarray:
    """Gradient of the quadratic cost w.r.t. the weights: -error * x."""
    return -error * reg.taps


def frac_power(w: float, exponent: float, policy: FracPowerPolicy = FracPowerPolicy.SIGNED_MAGNITUDE) -> float:
    """Evaluate w**exponent for exponent in (0, 1) and any real w.

    Total function: negative bases go through the configured policy and
    w = 0 maps to 0 under both policies.
    """
    if w == 0.0:
        return 0.0
    mag = abs(w) ** exponent
    if policy is FracPowerPolicy.MAGNITUDE_ONLY:
        return mag
    return -mag if w < 0.0 else mag


def _frac_power_vec(w: np.ndarray, exponent: float, policy: FracPowerPolicy) -> np.ndarray:
    mag = np.abs(w) ** exponent
    if policy is FracPowerPolicy.MAGNITUDE_ONLY:
        return mag
    return np.sign(w) * mag


def gamma(x: float) -> float:
    """Euler gamma function on the positive reals.

    Only arguments in (1, 2] are needed by the fractional updates (as
    gamma(2 - f) with f in (0, 1)); the stdlib implementation is accurate
    to well beyond 10 significant digits there.
    """
    if not x > 0.0:
        raise ValueError(f"gamma argument must be > 0, got {x}")
    return math.gamma(x)


def fractional_gradient(
    error: float,
    reg: Regressor,
    state: FilterState,
    f: float,
    policy: FracPowerPolicy = FracPowerPolicy.SIGNED_MAGNITUDE,
) -> np.ndarray:
    """Fractional-order gradient term: -error * x * w**(1-f) / gamma(2-f)."""
    if not 0.0 < f < 1.0:
        raise ValueError(f"fractional order must lie in (0, 1), got {f}")
    wp = _frac_power_vec(state.weights, 1.0 - f, policy)
    return -error * reg.taps * wp / gamma(2.0 - f)


def _check_finite(weights: np.ndarray, error: float, nu: float, iteration: int) -> None:
    if not (math.isfinite(error) and math.isfinite(nu) and bool(np.isfinite(weights).all())):
        raise DivergedError(iteration)


def flms_step(
    state: FilterState, reg: Regressor, desired: float, cfg: FilterConfig
) -> tuple[FilterState, float]:
    """One FLMS update with constant step sizes nu_init and nu_f_init.

    w <- w + nu*e*x + nu_f*e*x*w**(1-f)/gamma(2-f).  With nu_f_init = 0
    this is exactly the plain LMS recursion.

    Returns the advanced state and the prediction error; raises
    :class:`DivergedError` if the update produces a non-finite value.
    """
    error = desired - predict(state, reg)
    f = cfg.frac_order
    wp = _frac_power_vec(state.weights, 1.0 - f, cfg.frac_power_policy)
    w = state.weights + (cfg.nu_init * error) * reg.taps + (cfg.nu_f_init * error) * reg.taps * wp / gamma(2.0 - f)
    _check_finite(w, error, state.nu, state.iteration)
    new = FilterState(weights=w, nu=state.nu, p=state.p, prev_error=error, iteration=state.iteration + 1)
    return new, error


def rvss_flms_step(
    state: FilterState, reg: Regressor, desired: float, cfg: FilterConfig
) -> tuple[FilterState, float]:
    """One RVSS-FLMS update.

    The weight update w <- w + nu(n)*e*x*(1 + w**(1-f)) uses the current
    step size; afterwards the error-energy correlation p and the step size
    nu are advanced, so the returned state carries nu(n+1).
    """
    error = desired - predict(state, reg)
    wp = _frac_power_vec(state.weights, 1.0 - cfg.frac_order, cfg.frac_power_policy)
    w = state.weights + (state.nu * error) * reg.taps * (1.0 + wp)
    p = update_correlation(state.p, error, state.prev_error, cfg.alpha)
    nu = update_step_size(state.nu, p, cfg)
    _check_finite(w, error, nu, state.iteration)
    new = FilterState(weights=w, nu=nu, p=p, prev_error=error, iteration=state.iteration + 1)
    return new, error
