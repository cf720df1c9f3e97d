"""Binary-input AWGN capacity, design-power inversion, and the rate-optimal design.

Rates are in bits (log base 2).  The output density of equiprobable BPSK
with amplitude √P over AWGN of variance σ² is a two-Gaussian mixture; its
differential entropy minus the noise entropy ½·log2(2πeσ²) is the
symmetric capacity.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import optimize, special

from polarfade.exceptions import InfeasibleError, InvalidArgumentError, NumericError
from polarfade.models import Objective, OptimalDesign, PowerBudget, QuadratureSpec
from polarfade.services.fading import FadingModel
from polarfade.services.metrics import metrics
from polarfade.services.power_control import erasure_prob, make_policy
from polarfade.services.quadrature import integrate_scalar

logger = logging.getLogger(__name__)

_LOG2_E = 1.0 / math.log(2.0)
_MAX_DOUBLINGS = 200

# Design-power search: steps in log P while bracketing, then bounded Brent
# to an absolute tolerance in log P (relative tolerance in P).
_LOG_STEP = 0.5
_LOG_XATOL = 1e-7
_MAX_BRACKET_STEPS = 60


def _check_noise(P: float, sigma2: float) -> None:
    if not sigma2 > 0:
        raise InvalidArgumentError(f"sigma2 must be positive, got {sigma2}")
    if not P >= 0:
        raise InvalidArgumentError(f"P must be nonnegative, got {P}")


def output_density(y, P: float, sigma2: float):
    """f_Y(y) for equiprobable ±√P inputs; accepts scalars or arrays."""
    _check_noise(P, sigma2)
    a = math.sqrt(P)
    norm = 1.0 / math.sqrt(2.0 * math.pi * sigma2)
    y = np.asarray(y, dtype=np.float64)
    density = 0.5 * norm * (
        np.exp(-((y - a) ** 2) / (2.0 * sigma2)) + np.exp(-((y + a) ** 2) / (2.0 * sigma2))
    )
    return float(density) if density.ndim == 0 else density


def output_entropy(P: float, sigma2: float, quad: QuadratureSpec) -> float:
    """Differential entropy -∫ f_Y log2 f_Y of the channel output, in bits."""
    _check_noise(P, sigma2)
    a = math.sqrt(P)
    half_width = a + quad.range_sigmas * math.sqrt(sigma2)

    def integrand(y: float) -> float:
        # xlogy gives f·log f = 0 at f = 0
        return -float(special.xlogy(f := output_density(y, P, sigma2), f)) * _LOG2_E

    # f_Y is even; integrate the right half and double it.
    return 2.0 * integrate_scalar(integrand, 0.0, half_width, quad, points=(a,))


def bi_awgn_capacity(P: float, sigma2: float, quad: QuadratureSpec) -> float:
    """Symmetric capacity of BPSK(√P) over AWGN(σ²), in bits per channel use."""
    h_y = output_entropy(P, sigma2, quad)
    h_noise = 0.5 * math.log2(2.0 * math.pi * math.e * sigma2)
    return min(1.0, max(0.0, h_y - h_noise))


def bi_awgn_capacity_mc(
    P: float, sigma2: float, samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Monte Carlo estimate of I(X;Y) with its standard error.

    Uses I = 1 - E[log2(1 + e^{-L})] with L the LLR of bit 0 sent as +√P;
    by symmetry only that input needs sampling.
    """
    _check_noise(P, sigma2)
    if samples < 2:
        raise InvalidArgumentError("need at least two samples")
    y = math.sqrt(P) + math.sqrt(sigma2) * rng.standard_normal(samples)
    llr = 2.0 * math.sqrt(P) * y / sigma2
    penalty = np.logaddexp(0.0, -llr) * _LOG2_E
    return 1.0 - float(penalty.mean()), float(penalty.std(ddof=1) / math.sqrt(samples))


def solve_design_power(R: float, sigma2: float, quad: QuadratureSpec) -> float:
    """BPSK power P at which the binary-input AWGN capacity equals R."""
    if not 0.0 < R < 1.0:
        raise InvalidArgumentError(f"R must lie in (0, 1), got {R}")
    _check_noise(0.0, sigma2)
    metrics.inc_capacity_solve()

    def gap(P: float) -> float:
        return bi_awgn_capacity(P, sigma2, quad) - R

    hi = sigma2
    for _ in range(_MAX_DOUBLINGS):
        if gap(hi) > 0:
            break
        hi *= 2.0
    else:
        raise NumericError(f"capacity never exceeded R={R}")

    P = optimize.bisect(gap, 0.0, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=400)
    logger.debug("Design power %.12g for R=%.6g sigma2=%.6g", P, R, sigma2)
    return P


def equivalent_capacity(c_awgn: float, eps: float) -> float:
    """Capacity (1-ε)·C_AWGN of AWGN followed by an independent erasure."""
    if not 0.0 <= c_awgn <= 1.0:
        raise InvalidArgumentError(f"c_awgn must lie in [0, 1], got {c_awgn}")
    if not 0.0 <= eps <= 1.0:
        raise InvalidArgumentError(f"eps must lie in [0, 1], got {eps}")
    return (1.0 - eps) * c_awgn


def design_objective(
    P: float,
    Q: float,
    Qpeak: float,
    sigma2: float,
    fading: FadingModel,
    quad: QuadratureSpec,
    objective: Objective = "throughput",
) -> tuple[float, float]:
    """Return (J(P), ε(P)) for the rate-optimal design problem.

    ``throughput`` weighs the capacity by the non-erased fraction;
    ``entropy`` weighs the output entropy alone.
    """
    budget = PowerBudget(P=P, Q=Q, Qpeak=Qpeak, sigma2=sigma2)
    eps = erasure_prob(make_policy(budget, fading, quad).delta, fading)
    if eps >= 1.0:
        return 0.0, 1.0
    if objective == "throughput":
        rate = bi_awgn_capacity(P, sigma2, quad)
    else:
        rate = output_entropy(P, sigma2, quad)
    return (1.0 - eps) * rate, eps


def optimize_design_power(
    Q: float,
    Qpeak: float,
    sigma2: float,
    fading: FadingModel,
    quad: QuadratureSpec,
    objective: Objective = "throughput",
) -> OptimalDesign:
    """Maximize J(P) over P ∈ (0, Q̃] by bracketing then bounded Brent in log P."""
    if not Q > 0 or not Qpeak > 0:
        raise InvalidArgumentError(f"Q and Qpeak must be positive, got Q={Q}, Qpeak={Qpeak}")
    _check_noise(0.0, sigma2)

    x_max = math.log(Qpeak)
    evaluated: dict[float, tuple[float, float]] = {}

    def evaluate(x: float) -> float:
        x = min(x, x_max)
        if x not in evaluated:
            evaluated[x] = design_objective(
                math.exp(x), Q, Qpeak, sigma2, fading, quad, objective
            )
        return evaluated[x][0]

    a, b, c = _bracket_log_power(evaluate, min(math.log(Q), x_max), x_max)
    if max(evaluated.values())[0] <= 0.0:
        raise InfeasibleError(f"no design power yields positive throughput at Q={Q}")

    if c > a:
        result = optimize.minimize_scalar(
            lambda x: -evaluate(x),
            bounds=(a, c),
            method="bounded",
            options={"xatol": _LOG_XATOL},
        )
        evaluate(float(result.x))

    x_star = max(evaluated, key=lambda x: (evaluated[x][0], -x))
    j_star, eps_star = evaluated[x_star]
    p_star = math.exp(x_star)
    r_star = bi_awgn_capacity(p_star, sigma2, quad)

    logger.debug(
        "Optimal design at Q=%.6g: P*=%.12g R*=%.12g eps*=%.6g", Q, p_star, r_star, eps_star
    )
    return OptimalDesign(p_star=p_star, r_star=r_star, eps_star=eps_star, objective_value=j_star)


def _bracket_log_power(evaluate, x0: float, x_max: float) -> tuple[float, float, float]:
    """Find a < b < c in log P with J(b) ≥ J(a), J(c), clipped at log Q̃.

    When J still rises at the peak-power boundary the bracket ends there
    and the maximum may sit on it.
    """
    j0 = evaluate(x0)
    step = _LOG_STEP
    right = min(x0 + step, x_max)
    j_right = evaluate(right) if right > x0 else -math.inf
    left = x0 - step
    j_left = evaluate(left)

    if j_right > j0:
        a, b = x0, right
        for _ in range(_MAX_BRACKET_STEPS):
            if b >= x_max:
                return a, b, b
            step *= 2.0
            c = min(b + step, x_max)
            if evaluate(c) < evaluate(b):
                return a, b, c
            a, b = b, c
        raise NumericError("design power bracket did not close above")

    if j_left > j0:
        b, c = left, x0
        for _ in range(_MAX_BRACKET_STEPS):
            step *= 2.0
            a = b - step
            if evaluate(a) < evaluate(b):
                return a, b, c
            b, c = a, b
        raise NumericError("design power bracket did not close below")

    return left, x0, max(right, x0)
