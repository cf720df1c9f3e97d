"""Truncated channel inversion under average and peak power constraints.

The transmitter inverts the gain only when |H| ≥ δ with
δ = max(δ̄, √(P/Q̃)): δ̄ keeps the average transmit power within Q, the
second term keeps every symbol's power within the peak Q̃.
"""

from __future__ import annotations

import logging
import math

from scipy import optimize

from polarfade.exceptions import InvalidArgumentError, NumericError
from polarfade.models import InversionPolicy, PowerBudget, QuadratureSpec
from polarfade.services.fading import FadingModel
from polarfade.services.metrics import metrics

logger = logging.getLogger(__name__)

_DELTA_TOL = 1e-10
_MAX_BRACKET_STEPS = 200


def expended_power(
    P: float, delta: float, fading: FadingModel, quad: QuadratureSpec
) -> float:
    """Average transmit power P·E[H⁻²; |H| ≥ δ]; ``math.inf`` when it diverges."""
    if not P > 0:
        raise InvalidArgumentError(f"P must be positive, got {P}")
    if not delta >= 0:
        raise InvalidArgumentError(f"delta must be nonnegative, got {delta}")
    return P * fading.inverse_square_moment(delta, quad)


def solve_delta_bar(
    budget: PowerBudget, fading: FadingModel, quad: QuadratureSpec
) -> float:
    """Smallest δ̄ ≥ 0 whose expended power does not exceed Q.

    Returns 0 when full inversion is affordable.  The root is refined to
    1e-10 and then stepped onto the feasible side, so the returned
    threshold always satisfies the budget.
    """
    metrics.inc_threshold_solve()
    P, Q = budget.P, budget.Q

    def excess(delta: float) -> float:
        return expended_power(P, delta, fading, quad) - Q

    if excess(0.0) <= 0:
        return 0.0

    # Upper end: beyond the truncated support almost nothing is spent.
    _, hi = fading.abs_support()
    hi = max(hi, 1e-12) * (1.0 + 1e-9)
    for _ in range(_MAX_BRACKET_STEPS):
        if excess(hi) <= 0:
            break
        hi *= 2.0
    else:
        raise NumericError(f"could not bracket delta_bar above for Q={Q}")

    # Lower end: expended power grows without bound (or to its finite δ=0
    # value, which already exceeds Q) as δ shrinks.
    lo = hi / 2.0
    for _ in range(_MAX_BRACKET_STEPS):
        if excess(lo) > 0:
            break
        hi = lo
        lo /= 2.0
    else:
        raise NumericError(f"could not bracket delta_bar below for Q={Q}")

    delta = optimize.brentq(excess, lo, hi, xtol=_DELTA_TOL / 100.0, rtol=1e-15)

    step = _DELTA_TOL / 100.0
    while excess(delta) > 0:
        delta = min(delta + step, hi)
        step *= 2.0

    logger.debug("delta_bar=%.12g for P=%.6g Q=%.6g", delta, P, Q)
    return delta


def peak_threshold(P: float, Qpeak: float) -> float:
    """√(P/Q̃): the smallest |H| whose inversion stays within the peak power."""
    if not P > 0 or not Qpeak > 0:
        raise InvalidArgumentError(f"P and Qpeak must be positive, got P={P}, Qpeak={Qpeak}")
    if math.isinf(Qpeak):
        return 0.0
    return math.sqrt(P / Qpeak)


def make_policy(
    budget: PowerBudget, fading: FadingModel, quad: QuadratureSpec
) -> InversionPolicy:
    delta_bar = solve_delta_bar(budget, fading, quad)
    delta_peak = peak_threshold(budget.P, budget.Qpeak)
    return InversionPolicy(
        delta=max(delta_bar, delta_peak), delta_bar=delta_bar, delta_peak=delta_peak
    )


def erasure_prob(delta: float, fading: FadingModel) -> float:
    """Fraction of slots skipped by the transmitter, P(|H| < δ)."""
    if not delta >= 0:
        raise InvalidArgumentError(f"delta must be nonnegative, got {delta}")
    if math.isinf(delta):
        return 1.0
    return fading.erasure_mass(delta)
