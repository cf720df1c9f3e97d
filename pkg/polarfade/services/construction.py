"""Frozen-set selection from the Bhattacharyya-parameter recursion.

A design SNR is the linear P/σ² of BPSK at amplitude √P over AWGN of
variance σ².  That channel's Bhattacharyya parameter is e^{-P/(2σ²)}, so
``construct`` starts the recursion at the symbol SNR Es/N0 = design_snr / 2.

``evolve_z`` returns Z_{n,j} in the recursion's own order, where index
2j-1 receives Z² (the better child).  Under the natural-order encoder that
order is the input order reversed: recursion index j is input index
N + 1 - j.  ``construct`` ranks in recursion order and maps the chosen
indices back to input positions.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from polarfade.exceptions import InvalidArgumentError
from polarfade.models import PolarCode

logger = logging.getLogger(__name__)


def initial_z_awgn(snr: float) -> float:
    """e^{-snr}: Bhattacharyya parameter of BPSK over AWGN at symbol SNR Es/N0 = snr."""
    if not snr >= 0:
        raise InvalidArgumentError(f"snr must be nonnegative, got {snr}")
    return math.exp(-snr)


def initial_z_mixture(snr: float, eps: float) -> float:
    """Bhattacharyya parameter of the AWGN channel followed by an independent erasure.

    An erased output contributes Z = 1 with weight eps.
    """
    if not 0.0 <= eps <= 1.0:
        raise InvalidArgumentError(f"eps must lie in [0, 1], got {eps}")
    return eps + (1.0 - eps) * initial_z_awgn(snr)


def evolve_z(z0: float, n: int) -> np.ndarray:
    """Apply Z -> (Z², 2Z - Z²) n times starting from Z_{0,1} = z0."""
    if not 0.0 <= z0 <= 1.0:
        raise InvalidArgumentError(f"z0 must lie in [0, 1], got {z0}")
    if n < 0:
        raise InvalidArgumentError(f"n must be nonnegative, got {n}")

    z = np.array([z0], dtype=np.float64)
    for _ in range(n):
        children = np.empty(2 * z.size, dtype=np.float64)
        squared = z * z
        children[0::2] = squared
        children[1::2] = 2.0 * z - squared
        z = children
    return z


def select_info_set(z, K: int) -> tuple[int, ...]:
    """1-based indices of the K smallest entries of *z*, ascending.

    Ties go to the smaller index.
    """
    z = np.asarray(z, dtype=np.float64)
    if not 0 <= K <= z.size:
        raise InvalidArgumentError(f"K={K} outside [0, {z.size}]")
    order = np.argsort(z, kind="stable")[:K]
    return tuple(sorted(int(j) + 1 for j in order))


def construct(N: int, K: int, design_snr: float, eps: float = 0.0) -> PolarCode:
    """Build an (N, K) polar code for the design SNR P/σ².

    ``eps = 0`` gives the plain AWGN design; ``eps > 0`` designs for the
    AWGN-plus-erasure mixture channel.
    """
    if N < 1 or N & (N - 1):
        raise InvalidArgumentError(f"N={N} is not a power of two")
    n = N.bit_length() - 1

    snr = design_snr / 2.0
    z0 = initial_z_mixture(snr, eps) if eps > 0 else initial_z_awgn(snr)
    ranked = select_info_set(evolve_z(z0, n), K)
    info_set = tuple(sorted(N + 1 - j for j in ranked))

    logger.debug(
        "Constructed polar code N=%d K=%d design_snr=%.6g eps=%.6g", N, K, design_snr, eps
    )
    return PolarCode(n=n, K=K, info_set=info_set, design_snr=design_snr, eps=eps)
