"""Online transmission with truncated channel inversion over fast-fading AWGN.

Per slot k the transmitter sees H_k (CSIT).  When |H_k| ≥ δ it sends
sign(H_k)·(−1)^{x_k}·√(P/H_k²), so the receiver observes
(−1)^{x_k}·√P + η; otherwise it stays silent and the receiver, which also
knows H_k (CSIR), marks the slot erased.

The scalar functions model one slot; the block functions draw the whole
block's gains and noise at once from the caller's generator, gains first
and then noise, so every model that consumes no randomness for its gains
reproduces a plain BPSK-AWGN stream exactly.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from polarfade.exceptions import InvalidArgumentError
from polarfade.models import (
    ERASED,
    BlockDiagnostics,
    ChannelObservation,
    InversionPolicy,
    PolarCode,
    PowerBudget,
    TransmitDecision,
)
from polarfade.services.fading import FadingModel
from polarfade.services.polar_core import encode, sc_decode_batch


def _check_bit(x: int) -> None:
    if x not in (0, 1):
        raise InvalidArgumentError(f"bit must be 0 or 1, got {x!r}")


def _active(h, delta: float):
    """Slots the transmitter uses; H = 0 is always skipped."""
    magnitude = np.abs(h)
    return (magnitude >= delta) & (magnitude > 0)


def llr_from_sample(y, P: float, sigma2: float):
    """Base-e LLR of BPSK(√P) in AWGN(σ²); positive favours bit 0."""
    return 2.0 * math.sqrt(P) * y / sigma2


# ---------------------------------------------------------------------------
# Single slot
# ---------------------------------------------------------------------------


def transmit_symbol(x_k: int, H_k: float, P: float, policy: InversionPolicy) -> TransmitDecision:
    _check_bit(x_k)
    if not P > 0:
        raise InvalidArgumentError(f"P must be positive, got {P}")
    if not _active(H_k, policy.delta):
        return TransmitDecision(power_T=0.0, symbol=0.0)
    power_T = P / (H_k * H_k)
    symbol = math.copysign(1.0, H_k) * (1.0 - 2.0 * x_k) * math.sqrt(power_T)
    return TransmitDecision(power_T=power_T, symbol=symbol)


def propagate(
    decision: TransmitDecision, H_k: float, sigma2: float, rng: np.random.Generator
) -> float:
    """Y = H·X + η with η ~ N(0, σ²); one normal draw per call."""
    if not sigma2 > 0:
        raise InvalidArgumentError(f"sigma2 must be positive, got {sigma2}")
    return H_k * decision.symbol + math.sqrt(sigma2) * float(rng.standard_normal())


def demodulate(
    y: float, H_k: float, P: float, sigma2: float, policy: InversionPolicy
) -> tuple[ChannelObservation, float]:
    """Receiver side of one slot: erase skipped slots, otherwise return the LLR."""
    if not _active(H_k, policy.delta):
        return ChannelObservation.erasure(), ERASED
    return ChannelObservation.sample(y), float(llr_from_sample(y, P, sigma2))


def cascade_channel(
    x_k: int, eps: float, P: float, sigma2: float, rng: np.random.Generator
) -> ChannelObservation:
    """BPSK-AWGN followed by an erasure that is independent of the AWGN output."""
    _check_bit(x_k)
    if not 0.0 <= eps <= 1.0:
        raise InvalidArgumentError(f"eps must lie in [0, 1], got {eps}")
    if rng.random() < eps:
        return ChannelObservation.erasure()
    y = (1.0 - 2.0 * x_k) * math.sqrt(P) + math.sqrt(sigma2) * float(rng.standard_normal())
    return ChannelObservation.sample(y)


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------


def inverted_observations(
    codeword: np.ndarray,
    P: float,
    sigma2: float,
    fading: FadingModel,
    delta: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Received samples for one codeword and the per-slot transmit powers.

    Erased slots carry NaN in the returned samples and 0 in the powers.
    """
    N = codeword.shape[0]
    h = np.asarray(fading.sample(rng, N), dtype=np.float64)
    noise = rng.standard_normal(N)

    active = _active(h, delta)
    safe_h = np.where(active, h, 1.0)
    power_T = np.where(active, P / (safe_h * safe_h), 0.0)
    symbol = np.sign(safe_h) * (1.0 - 2.0 * codeword) * np.sqrt(power_T)
    y = h * symbol + math.sqrt(sigma2) * noise
    return np.where(active, y, ERASED), power_T


def cascade_observations(
    codeword: np.ndarray, eps: float, P: float, sigma2: float, rng: np.random.Generator
) -> np.ndarray:
    """Vector form of :func:`cascade_channel`: erasure draws first, then noise."""
    if not 0.0 <= eps <= 1.0:
        raise InvalidArgumentError(f"eps must lie in [0, 1], got {eps}")
    N = codeword.shape[0]
    erased = rng.random(N) < eps
    y = (1.0 - 2.0 * codeword) * math.sqrt(P) + math.sqrt(sigma2) * rng.standard_normal(N)
    return np.where(erased, ERASED, y)


def _diagnostics(power_T: np.ndarray) -> BlockDiagnostics:
    active = power_T > 0
    return BlockDiagnostics(
        erasures=int(power_T.size - np.count_nonzero(active)),
        energy=float(power_T.sum()),
        peak_power=float(power_T.max()) if power_T.size else 0.0,
    )


def simulate_blocks(
    code: PolarCode,
    messages,
    budget: PowerBudget,
    fading: FadingModel,
    policy: InversionPolicy,
    rngs: Sequence[np.random.Generator],
) -> tuple[np.ndarray, list[BlockDiagnostics]]:
    """Encode, transmit, demodulate and SC-decode a batch of messages.

    Row b uses ``rngs[b]`` alone, so each row equals a :func:`simulate_block`
    call with that generator.
    """
    messages = np.asarray(messages, dtype=np.uint8)
    if messages.ndim != 2 or messages.shape[0] != len(rngs):
        raise InvalidArgumentError(
            f"need one generator per message row, got {messages.shape} and {len(rngs)}"
        )
    codewords = encode(messages, code)

    llrs = np.empty(codewords.shape, dtype=np.float64)
    diagnostics = []
    for row, (codeword, rng) in enumerate(zip(codewords, rngs)):
        y, power_T = inverted_observations(
            codeword, budget.P, budget.sigma2, fading, policy.delta, rng
        )
        llrs[row] = llr_from_sample(y, budget.P, budget.sigma2)
        diagnostics.append(_diagnostics(power_T))

    return sc_decode_batch(llrs, code), diagnostics


def simulate_block(
    code: PolarCode,
    message,
    budget: PowerBudget,
    fading: FadingModel,
    policy: InversionPolicy,
    rng: np.random.Generator,
) -> tuple[np.ndarray, BlockDiagnostics]:
    decoded, diagnostics = simulate_blocks(
        code, np.asarray(message)[np.newaxis, :], budget, fading, policy, [rng]
    )
    return decoded[0], diagnostics[0]


def simulate_awgn_block(
    code: PolarCode, message, P: float, sigma2: float, rng: np.random.Generator
) -> np.ndarray:
    """Plain BPSK-AWGN reference: no fading, no inversion, no erasures."""
    if not P > 0 or not sigma2 > 0:
        raise InvalidArgumentError(f"P and sigma2 must be positive, got P={P}, sigma2={sigma2}")
    codeword = encode(message, code)
    noise = rng.standard_normal(code.N)
    y = (1.0 - 2.0 * codeword) * math.sqrt(P) + math.sqrt(sigma2) * noise
    return sc_decode_batch(llr_from_sample(y, P, sigma2)[np.newaxis, :], code)[0]


def count_errors(decoded: np.ndarray, messages: np.ndarray) -> tuple[int, int]:
    """(bit errors, block errors) between two (B, K) bit arrays."""
    wrong = np.atleast_2d(np.asarray(decoded) != np.asarray(messages))
    return int(np.count_nonzero(wrong)), int(np.count_nonzero(wrong.any(axis=1)))
