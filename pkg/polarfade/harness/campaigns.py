"""Parameter sweeps and Monte Carlo BER campaigns.

Three campaigns are provided:

- ``sweep_epsilon_vs_q``: erasure probability against operating power,
  purely numerical.
- ``run_ber_campaign``: bit and block error rates of the proposed code
  construction against the mixture-channel construction, both transmitted
  with truncated channel inversion.
- ``sweep_optimal_rate``: the rate-optimal design point per operating power.

Trials of a BER point run in chunks of ``batch_size`` on a thread pool.
Chunks are reduced strictly in chunk order and the early stop is checked
after each chunk, so the counts depend on neither the worker count nor
completion order.
"""

from __future__ import annotations

import contextvars
import logging
import math
import os
import time
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from polarfade.config import settings
from polarfade.exceptions import InvalidArgumentError
from polarfade.harness.seeding import trial_rng
from polarfade.models import (
    BerPoint,
    CampaignConfig,
    EpsilonPoint,
    InversionPolicy,
    OptimalRatePoint,
    PolarCode,
    PowerBudget,
    QuadratureSpec,
)
from polarfade.services.cache import design_cache
from polarfade.services.capacity import optimize_design_power, solve_design_power
from polarfade.services.channel_sim import count_errors, simulate_blocks
from polarfade.services.construction import construct
from polarfade.services.fading import FadingModel, GaussianFading, parse_fading
from polarfade.services.metrics import metrics
from polarfade.services.power_control import erasure_prob, make_policy

logger = logging.getLogger(__name__)

# Two-sided 95% normal quantile.
_Z95 = 1.959963984540054


@dataclass
class _Tally:
    trials: int = 0
    bit_errors: int = 0
    block_errors: int = 0
    erasures: int = 0

    def add(self, other: _Tally) -> None:
        self.trials += other.trials
        self.bit_errors += other.bit_errors
        self.block_errors += other.block_errors
        self.erasures += other.erasures


def resolve_threads(threads: int | None) -> int:
    """Worker count: explicit value, then ``POLARFADE_THREADS``, then CPU count."""
    count = threads or settings.threads or os.cpu_count() or 1
    if count < 1:
        raise InvalidArgumentError(f"threads must be positive, got {count}")
    return count


# ---------------------------------------------------------------------------
# Cached design steps
# ---------------------------------------------------------------------------


def design_power(config: CampaignConfig) -> float:
    """Design power P: the override when set, else the power whose capacity is K/N."""
    if config.p_design is not None:
        return config.p_design
    rate = config.K / config.N
    if not 0.0 < rate < 1.0:
        raise InvalidArgumentError(
            f"code rate K/N={rate} must lie in (0, 1) to solve the design power"
        )
    return design_cache.get_or_compute(
        ("design_power", rate, config.sigma2, config.quad),
        lambda: solve_design_power(rate, config.sigma2, config.quad),
    )


def _policy(
    P: float, Q: float, Qpeak: float, sigma2: float, fading: FadingModel, quad: QuadratureSpec
) -> InversionPolicy:
    budget = PowerBudget(P=P, Q=Q, Qpeak=Qpeak, sigma2=sigma2)
    return design_cache.get_or_compute(
        ("policy", P, Q, Qpeak, sigma2, fading.spec, quad),
        lambda: make_policy(budget, fading, quad),
    )


def _code(N: int, K: int, design_snr: float, eps: float) -> PolarCode:
    return design_cache.get_or_compute(
        ("code", N, K, design_snr, eps), lambda: construct(N, K, design_snr, eps)
    )


# ---------------------------------------------------------------------------
# Erasure probability against operating power
# ---------------------------------------------------------------------------


def _fadings(config: CampaignConfig) -> list[FadingModel]:
    if config.sigma_h2_grid:
        return [GaussianFading(s) for s in config.sigma_h2_grid]
    return [parse_fading(config.fading)]


def _gain_variance(fading: FadingModel) -> float:
    """σ_H² of a Gaussian gain; NaN for the other fading families."""
    return fading.sigma_h2 if isinstance(fading, GaussianFading) else math.nan


def sweep_epsilon_vs_q(config: CampaignConfig) -> list[EpsilonPoint]:
    """ε(Q) per gain variance; one curve per entry of ``sigma_h2_grid``.

    Without a variance grid the single ``fading`` model is swept.
    """
    P = design_power(config)
    points: list[EpsilonPoint] = []
    for fading in _fadings(config):
        for q in config.q_grid:
            start = time.monotonic()
            policy = _policy(P, q, config.qpeak, config.sigma2, fading, config.quad)
            eps = erasure_prob(policy.delta, fading)
            points.append(
                EpsilonPoint(
                    q=q,
                    fading=fading.spec,
                    sigma_h2=_gain_variance(fading),
                    p_design=P,
                    delta=policy.delta,
                    epsilon=eps,
                )
            )
            metrics.record_point((time.monotonic() - start) * 1000)
            logger.info(
                "eps point",
                extra={"q": q, "fading": fading.spec, "delta": policy.delta, "eps": eps},
            )
    return points


# ---------------------------------------------------------------------------
# Bit error rate campaigns
# ---------------------------------------------------------------------------


def _run_chunk(
    code: PolarCode,
    budget: PowerBudget,
    fading: FadingModel,
    policy: InversionPolicy,
    master_seed: int,
    point_index: int,
    first_trial: int,
    count: int,
) -> _Tally:
    trials = range(first_trial, first_trial + count)
    rngs = [trial_rng(master_seed, point_index, t) for t in trials]
    # Each trial's message comes from its own stream ahead of the channel draws.
    messages = np.stack([rng.integers(0, 2, code.K, dtype=np.uint8) for rng in rngs])
    decoded, diagnostics = simulate_blocks(code, messages, budget, fading, policy, rngs)
    bit_errors, block_errors = count_errors(decoded, messages)
    erasures = sum(d.erasures for d in diagnostics)
    return _Tally(count, bit_errors, block_errors, erasures)


def _simulate_point(
    code: PolarCode,
    budget: PowerBudget,
    fading: FadingModel,
    policy: InversionPolicy,
    config: CampaignConfig,
    point_index: int,
    pool: Executor,
    workers: int,
) -> _Tally:
    chunks = [
        (first, min(config.batch_size, config.trials - first))
        for first in range(0, config.trials, config.batch_size)
    ]
    total = _Tally()
    for wave_start in range(0, len(chunks), workers):
        wave = chunks[wave_start : wave_start + workers]
        futures = [
            pool.submit(
                contextvars.copy_context().run,
                _run_chunk,
                code,
                budget,
                fading,
                policy,
                config.master_seed,
                point_index,
                first,
                count,
            )
            for first, count in wave
        ]
        for future in futures:
            # Only reduced chunks are counted; the rest of a stopped wave is dropped.
            tally = future.result()
            total.add(tally)
            metrics.inc_blocks(
                tally.trials, tally.bit_errors, tally.block_errors, tally.erasures
            )
            if config.max_bit_errors and total.bit_errors >= config.max_bit_errors:
                for pending in futures:
                    pending.cancel()
                return total
    return total


def _ber_point(q: float, scheme: str, n: int, K: int, tally: _Tally) -> BerPoint:
    bits = tally.trials * K
    ber = tally.bit_errors / bits if bits else 0.0
    bler = tally.block_errors / tally.trials if tally.trials else 0.0
    ci95 = _Z95 * math.sqrt(ber * (1.0 - ber) / bits) if bits else 0.0
    return BerPoint(
        q_or_snr=q,
        scheme=scheme,
        n=n,
        k=K,
        trials=tally.trials,
        bit_errors=tally.bit_errors,
        block_errors=tally.block_errors,
        ber=ber,
        bler=bler,
        ci95_halfwidth=ci95,
    )


def run_ber_campaign(config: CampaignConfig, threads: int | None = None) -> list[BerPoint]:
    """BER and BLER per (Q, scheme), ordered by grid index then scheme.

    Both schemes transmit with the same inversion policy and see the same
    per-trial streams; they differ only in the frozen set.  ``proposed``
    designs for AWGN at P/σ², ``mixture_design`` for the AWGN-plus-erasure
    channel with ε(Q).
    """
    fading = parse_fading(config.fading)
    P = design_power(config)
    snr = P / config.sigma2
    N, K = config.N, config.K
    workers = resolve_threads(threads)

    points: list[BerPoint] = []
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="polarfade") as pool:
        for point_index, q in enumerate(config.q_grid):
            budget = PowerBudget(P=P, Q=q, Qpeak=config.qpeak, sigma2=config.sigma2)
            policy = _policy(P, q, config.qpeak, config.sigma2, fading, config.quad)
            eps = erasure_prob(policy.delta, fading)

            for scheme in config.schemes:
                start = time.monotonic()
                code = _code(N, K, snr, 0.0 if scheme == "proposed" else eps)
                tally = _simulate_point(
                    code, budget, fading, policy, config, point_index, pool, workers
                )
                point = _ber_point(q, scheme, config.n, K, tally)
                points.append(point)
                metrics.record_point((time.monotonic() - start) * 1000)
                logger.info(
                    "BER point",
                    extra={
                        "q": q,
                        "scheme": scheme,
                        "eps": eps,
                        "trials": point.trials,
                        "bit_errors": point.bit_errors,
                        "ber": point.ber,
                    },
                )
    return points


# ---------------------------------------------------------------------------
# Rate-optimal design
# ---------------------------------------------------------------------------


def sweep_optimal_rate(config: CampaignConfig) -> list[OptimalRatePoint]:
    fading = parse_fading(config.fading)
    points: list[OptimalRatePoint] = []
    for q in config.q_grid:
        start = time.monotonic()
        design = optimize_design_power(
            q, config.qpeak, config.sigma2, fading, config.quad, config.objective
        )
        points.append(
            OptimalRatePoint(
                q=q, p_star=design.p_star, r_star=design.r_star, epsilon_star=design.eps_star
            )
        )
        metrics.record_point((time.monotonic() - start) * 1000)
        logger.info(
            "Optimal rate point",
            extra={"q": q, "p_star": design.p_star, "r_star": design.r_star},
        )
    return points
