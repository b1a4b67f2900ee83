"""Robust variable step size: error-energy correlation and clamped geometric
step update.  Pure scalar functions."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["StepSizeParams", "update_correlation", "update_step_size"]


@dataclass(frozen=True)
class StepSizeParams:
    """Constants of the step-size recursion.

    Any object with these attributes works where a StepSizeParams is
    expected; in particular a FilterConfig can be passed directly.
    """

    alpha: float
    beta: float
    gamma: float
    nu_min: float
    nu_max: float


def update_correlation(p_prev: float, e_now: float, e_prev: float, alpha: float) -> float:
    """Average error-energy correlation: alpha*p + (1-alpha)*e(n)*e(n-1)."""
    return alpha * p_prev + (1.0 - alpha) * e_now * e_prev


def update_step_size(nu: float, p: float, params) -> float:
    """Advance the step size, beta*nu + gamma*p**2, clamped to [nu_min, nu_max].

    Boundary values pass through unchanged (closed interval).
    """
    raw = params.beta * nu + params.gamma * p * p
    if raw > params.nu_max:
        return params.nu_max
    if raw < params.nu_min:
        return params.nu_min
    return raw
