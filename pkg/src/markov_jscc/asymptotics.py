"""Large-deviation exponents, the critical rate, and the moderate-deviation
approximation.

Exponent functions act on a TiltedFamily whose variant selects the
assumption: "down" gives the E_1 pair, "up" the (tight below the critical
rate) E_2 pair. Converse exponents are computed in two independent ways,
the theta(a(R)) evaluation form and the sup form, and cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDispersionError,
    DomainError,
    NonConvergenceError,
    RateOutOfRangeError,
)
from .markov import JointChannelChain, SourceChain, check_assumption2
from .measures import ChainSpectra
from .tilted import THETA_MAX, THETA_MIN, TiltedFamily
from .finite_bounds import _grid_extremum

CROSS_CHECK_TOL = 1e-7


@dataclass(frozen=True)
class AsymptoticSummary:
    """Capacity-style scalars of a (source, channel) pair. ``dispersion`` is
    the bracketed combination [(C/H_s) V_s + V_c] / H_s^2 that drives the
    moderate-deviation regime."""

    rate_log_alphabet: float
    capacity: float
    entropy_rate_source: float
    entropy_rate_channel: float
    dispersion_source: float
    dispersion_channel: float
    optimal_rate: float
    dispersion: float
    critical_rate: float | None


def summarize(
    source: SourceChain, channel: JointChannelChain, rate_ratio: float | None = None
) -> AsymptoticSummary:
    src = ChainSpectra(source)
    ch = ChainSpectra(channel)
    rate = math.log(channel.x_size)
    h_source = src.entropy_rate()
    h_channel = ch.entropy_rate()
    v_source = src.dispersion()
    v_channel = ch.dispersion()
    capacity = rate - h_channel
    optimal_rate = capacity / h_source
    dispersion = (optimal_rate * v_source + v_channel) / h_source**2
    critical = None
    if rate_ratio is not None and check_assumption2(channel):
        critical = critical_rate(TiltedFamily(source, channel, rate_ratio, "up"))
    return AsymptoticSummary(
        rate_log_alphabet=rate,
        capacity=capacity,
        entropy_rate_source=h_source,
        entropy_rate_channel=h_channel,
        dispersion_source=v_source,
        dispersion_channel=v_channel,
        optimal_rate=optimal_rate,
        dispersion=dispersion,
        critical_rate=critical,
    )


def exponent_direct(family: TiltedFamily, rate: float, grid_density: int = 400) -> float:
    """Achievable error exponent at the given rate.

    Returns 0 when the rate does not exceed the entropy floor (the
    optimizer would sit at s = 0 with zero value).
    """
    if family.variant not in ("down", "up"):
        raise ValueError("exponents need a down or up family")
    if rate <= family.rate_floor():
        return 0.0
    if family.variant == "down":
        grid = np.linspace(1e-9, 1.0 - 1e-9, grid_density)
        objective = lambda s: s * rate - family.value(s)
    else:
        grid = np.linspace(0.0, 0.5, grid_density)
        objective = lambda s: (s * rate - family.value(s)) / (1.0 - s)
    _, value = _grid_extremum(objective, grid, True)
    return max(value, 0.0)


def _check_admissible(family: TiltedFamily, rate: float):
    floor, ceiling = family.rate_floor(), family.rate_ceiling()
    if not (floor < rate < ceiling):
        raise RateOutOfRangeError(
            f"rate {rate} outside the admissible interval ({floor}, {ceiling})"
        )


def exponent_converse_forms(
    family: TiltedFamily, rate: float, grid_density: int = 400
) -> tuple[float, float]:
    """(evaluation form, sup form) of the converse exponent.

    Evaluation form: theta(a(R)) a(R) - U(theta(a(R))). Sup form:
    sup (theta R - U(theta)) / (1 - theta) over theta <= 1 (down) or
    theta in [0, 1] (up).
    """
    _check_admissible(family, rate)
    theta_star = family.theta_of_rate(rate)
    eval_form = theta_star * family.derivative(theta_star) - family.value(theta_star)
    lo = THETA_MIN if family.variant == "down" else 0.0
    grid = np.linspace(lo, THETA_MAX, grid_density)
    objective = lambda t: (t * rate - family.value(t)) / (1.0 - t)
    _, sup_form = _grid_extremum(objective, grid, True)
    return eval_form, sup_form


def exponent_converse(family: TiltedFamily, rate: float) -> float:
    eval_form, sup_form = exponent_converse_forms(family, rate)
    if abs(eval_form - sup_form) > CROSS_CHECK_TOL * max(1.0, abs(eval_form)):
        raise NonConvergenceError(
            f"converse exponent forms disagree: {eval_form} vs {sup_form}"
        )
    return eval_form


def critical_rate(family: TiltedFamily) -> float:
    """R_cr = R(u(1/2)) for the up family: below it the direct and converse
    exponents coincide; above it the direct optimizer clips at s = 1/2."""
    if family.variant != "up":
        raise ValueError("the critical rate is defined for the up family")
    return 0.5 * family.derivative(0.5) + family.value(0.5)


def moderate_deviation(summary: AsymptoticSummary, delta: float, t: float) -> float:
    """Coefficient of the n^(1-2t)-scale decay when the rate approaches the
    optimal rate as delta * n^(-t)."""
    if not 0.0 < t < 0.5:
        raise DomainError("need t in (0, 1/2)")
    if delta < 0.0:
        raise DomainError("delta must be nonnegative")
    if not summary.dispersion > 0.0:
        raise DegenerateDispersionError("dispersion must be positive")
    return 0.5 * delta**2 / summary.dispersion


def md_approx(summary: AsymptoticSummary, k: int, n: int) -> float:
    """Finite-(k, n) moderate-deviation approximation
    E_md(k, n) = n (C/H - k/n)^2 / (2 dispersion)."""
    if not summary.dispersion > 0.0:
        raise DegenerateDispersionError("dispersion must be positive")
    gap = summary.optimal_rate - k / n
    if gap <= 0.0:
        raise RateOutOfRangeError(
            f"k/n = {k / n} must sit below the optimal rate {summary.optimal_rate}"
        )
    return n * gap**2 / (2.0 * summary.dispersion)
