"""Polar encoding (x = u·F^{⊗n}) and successive cancellation decoding.

No bit-reversal permutation is applied: input index i of u maps through
F^{⊗n} directly, and construction ranks synthesized channels in the same
natural order.  LLRs are base-e with positive values favouring bit 0;
erased positions are NaN and enter the decoder as LLR 0.
"""

from __future__ import annotations

import numpy as np

from polarfade.exceptions import InvalidArgumentError
from polarfade.models import PolarCode

# |LLR| is clamped before tanh; the tanh product is kept strictly inside
# (-1, 1) so atanh stays finite for near-certain inputs.
_LLR_CLAMP = 40.0
_TANH_MAX = float(np.nextafter(1.0, 0.0))


def _as_bits(values, name: str) -> np.ndarray:
    bits = np.asarray(values)
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise InvalidArgumentError(f"{name} must contain only 0/1 values")
    return bits.astype(np.uint8, copy=True)


def _check_power_of_two(length: int) -> None:
    if length < 1 or length & (length - 1):
        raise InvalidArgumentError(f"length {length} is not a power of two")


def transform(u) -> np.ndarray:
    """Return u·F^{⊗n} over GF(2) via the O(N log N) butterfly.

    Accepts a single vector of length N or a (B, N) batch.
    """
    x = _as_bits(u, "u")
    if x.ndim not in (1, 2):
        raise InvalidArgumentError("u must be a vector or a 2-D batch")
    N = x.shape[-1]
    _check_power_of_two(N)

    batch = x.reshape(-1, N)
    half = 1
    while half < N:
        # Each stage XORs the upper half of every 2*half block into the lower half.
        blocks = batch.reshape(batch.shape[0], N // (2 * half), 2, half)
        blocks[:, :, 0, :] ^= blocks[:, :, 1, :]
        half *= 2
    return batch.reshape(x.shape)


def encode(message, code: PolarCode) -> np.ndarray:
    """Place *message* on the info set (ascending order), freeze the rest, transform."""
    bits = _as_bits(message, "message")
    if bits.shape[-1] != code.K:
        raise InvalidArgumentError(
            f"message length {bits.shape[-1]} does not match K={code.K}"
        )
    u = np.zeros(bits.shape[:-1] + (code.N,), dtype=np.uint8)
    u[..., code.info_positions] = bits
    return transform(u)


def _check_node(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ta = np.tanh(np.clip(a, -_LLR_CLAMP, _LLR_CLAMP) / 2.0)
    tb = np.tanh(np.clip(b, -_LLR_CLAMP, _LLR_CLAMP) / 2.0)
    return 2.0 * np.arctanh(np.clip(ta * tb, -_TANH_MAX, _TANH_MAX))


def _variable_node(a: np.ndarray, b: np.ndarray, decided: np.ndarray) -> np.ndarray:
    return b + (1.0 - 2.0 * decided) * a


def _sc(llr: np.ndarray, frozen: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Decode one subtree; returns (u_hat, re-encoded x_hat), both (B, M)."""
    batch, M = llr.shape
    if frozen.all():
        zeros = np.zeros((batch, M), dtype=np.uint8)
        return zeros, zeros.copy()
    if M == 1:
        # Ties (LLR exactly 0) decide bit 0.
        u = (llr < 0).astype(np.uint8)
        return u, u.copy()

    h = M // 2
    first, second = llr[:, :h], llr[:, h:]
    u_first, w_first = _sc(_check_node(first, second), frozen[:h])
    u_second, w_second = _sc(_variable_node(first, second, w_first), frozen[h:])
    return (
        np.concatenate([u_first, u_second], axis=1),
        np.concatenate([w_first ^ w_second, w_second], axis=1),
    )


def sc_decode_batch(observations, code: PolarCode) -> np.ndarray:
    """Successive cancellation decode a (B, N) batch of soft vectors.

    Returns the (B, K) decoded information bits.  Rows are decoded
    independently; the result for each row equals :func:`sc_decode` on it.
    """
    llr = np.asarray(observations, dtype=np.float64)
    if llr.ndim != 2 or llr.shape[1] != code.N:
        raise InvalidArgumentError(
            f"observations must have shape (B, {code.N}), got {llr.shape}"
        )
    llr = np.where(np.isnan(llr), 0.0, llr)
    u_hat, _ = _sc(llr, code.frozen_mask)
    return u_hat[:, code.info_positions]


def sc_decode(observation, code: PolarCode) -> np.ndarray:
    """Successive cancellation decode one length-N soft vector into K bits."""
    llr = np.asarray(observation, dtype=np.float64)
    if llr.ndim != 1 or llr.shape[0] != code.N:
        raise InvalidArgumentError(
            f"observation length {llr.shape} does not match N={code.N}"
        )
    return sc_decode_batch(llr[np.newaxis, :], code)[0]
