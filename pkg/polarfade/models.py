"""Domain types shared across polarfade modules.

Validated, configuration-like values are pydantic models; values created
per symbol or per block on the simulation hot path are frozen dataclasses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from polarfade.config import settings
from polarfade.exceptions import InvalidArgumentError

# Block-level soft vectors mark erased positions with NaN.
ERASED = math.nan

Scheme = Literal["proposed", "mixture_design"]
Objective = Literal["throughput", "entropy"]


# ---------------------------------------------------------------------------
# Codes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolarCode:
    """An (N, K, F) polar code with the design point it was built for.

    ``info_set`` holds 1-based input indices in increasing order.
    """

    n: int
    K: int
    info_set: tuple[int, ...]
    design_snr: float
    eps: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvalidArgumentError(f"n must be nonnegative, got {self.n}")
        N = 1 << self.n
        if not 0 <= self.K <= N:
            raise InvalidArgumentError(f"K={self.K} outside [0, {N}]")
        if len(self.info_set) != self.K:
            raise InvalidArgumentError(
                f"info_set has {len(self.info_set)} indices, expected K={self.K}"
            )
        if list(self.info_set) != sorted(set(self.info_set)):
            raise InvalidArgumentError("info_set must be strictly increasing")
        if self.info_set and not (1 <= self.info_set[0] and self.info_set[-1] <= N):
            raise InvalidArgumentError(f"info_set indices must lie in 1..{N}")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def frozen_set(self) -> tuple[int, ...]:
        info = set(self.info_set)
        return tuple(i for i in range(1, self.N + 1) if i not in info)

    @cached_property
    def info_positions(self) -> np.ndarray:
        """0-based info positions, ready for fancy indexing."""
        return np.asarray(self.info_set, dtype=np.intp) - 1

    @cached_property
    def frozen_mask(self) -> np.ndarray:
        mask = np.ones(self.N, dtype=bool)
        mask[self.info_positions] = False
        mask.flags.writeable = False
        return mask


# ---------------------------------------------------------------------------
# Numerics
# ---------------------------------------------------------------------------


class QuadratureSpec(BaseModel):
    """Tolerances for the adaptive quadrature behind capacity and power integrals."""

    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default_factory=lambda: settings.quad_abs_tol, gt=0)
    max_subdivisions: int = Field(
        default_factory=lambda: settings.quad_max_subdivisions, ge=1
    )
    range_sigmas: float = Field(default_factory=lambda: settings.quad_range_sigmas, gt=0)


@dataclass(frozen=True)
class CapacityResult:
    """A (power, rate) operating point and the erasure rate it runs at."""

    rate: float
    power: float
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.rate <= 1.0:
            raise InvalidArgumentError(f"rate must lie in [0, 1], got {self.rate}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidArgumentError(f"epsilon must lie in [0, 1], got {self.epsilon}")


@dataclass(frozen=True)
class OptimalDesign:
    """Maximizer of the rate-optimal design problem at one operating power."""

    p_star: float
    r_star: float
    eps_star: float
    objective_value: float


# ---------------------------------------------------------------------------
# Power control
# ---------------------------------------------------------------------------


class PowerBudget(BaseModel):
    """Design power plus the average and peak constraints it operates under."""

    model_config = ConfigDict(frozen=True)

    P: float = Field(..., gt=0, description="Design power")
    Q: float = Field(..., gt=0, description="Average power constraint")
    Qpeak: float = Field(math.inf, gt=0, description="Peak power constraint; inf = none")
    sigma2: float = Field(1.0, gt=0, description="AWGN variance")


@dataclass(frozen=True)
class InversionPolicy:
    """Truncated channel inversion threshold and its two components."""

    delta: float
    delta_bar: float
    delta_peak: float

    def __post_init__(self) -> None:
        if min(self.delta, self.delta_bar, self.delta_peak) < 0:
            raise InvalidArgumentError("thresholds must be nonnegative")
        if self.delta != max(self.delta_bar, self.delta_peak):
            raise InvalidArgumentError("delta must equal max(delta_bar, delta_peak)")


# ---------------------------------------------------------------------------
# Channel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransmitDecision:
    power_T: float
    symbol: float


@dataclass(frozen=True)
class ChannelObservation:
    """What the receiver sees in one slot: a real sample or an erasure."""

    value: float | None

    @classmethod
    def sample(cls, y: float) -> ChannelObservation:
        return cls(float(y))

    @classmethod
    def erasure(cls) -> ChannelObservation:
        return cls(None)

    @property
    def erased(self) -> bool:
        return self.value is None


@dataclass(frozen=True)
class BlockDiagnostics:
    erasures: int
    energy: float
    peak_power: float


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BerPoint:
    q_or_snr: float
    scheme: str
    n: int
    k: int
    trials: int
    bit_errors: int
    block_errors: int
    ber: float
    bler: float
    ci95_halfwidth: float


@dataclass(frozen=True)
class EpsilonPoint:
    """One point of an erasure curve.

    ``sigma_h2`` is the gain variance of Gaussian fading and NaN otherwise;
    ``fading`` always names the model.
    """

    q: float
    fading: str
    sigma_h2: float
    p_design: float
    delta: float
    epsilon: float


@dataclass(frozen=True)
class OptimalRatePoint:
    q: float
    p_star: float
    r_star: float
    epsilon_star: float


class CampaignConfig(BaseModel):
    """Fully resolved parameters of one sweep or Monte Carlo campaign."""

    model_config = ConfigDict(frozen=True, extra="forbid", ser_json_inf_nan="constants")

    figure: Literal[3, 5, 6] = 5
    n: int = Field(10, ge=1, le=20, description="log2 blocklength")
    k: int | None = Field(None, ge=0, description="Information bits; derived from rate if unset")
    rate: float = Field(0.5, gt=0, lt=1)
    p_design: float | None = Field(None, gt=0, description="Override the rate-solved design power")
    sigma2: float = Field(1.0, gt=0)
    q_grid: tuple[float, ...] = Field(..., min_length=1)
    qpeak: float = Field(math.inf, gt=0)
    fading: str = "gaussian:1.0"
    sigma_h2_grid: tuple[float, ...] = ()
    trials: int = Field(1000, ge=1)
    max_bit_errors: int = Field(default_factory=lambda: settings.max_bit_errors, ge=0)
    batch_size: int = Field(default_factory=lambda: settings.batch_size, ge=1)
    master_seed: int = Field(0, ge=0)
    schemes: tuple[Scheme, ...] = ("proposed", "mixture_design")
    objective: Objective = "throughput"
    quad: QuadratureSpec = Field(default_factory=QuadratureSpec)

    @field_validator("q_grid")
    @classmethod
    def _strictly_increasing(cls, grid: tuple[float, ...]) -> tuple[float, ...]:
        if any(q <= 0 for q in grid):
            raise ValueError("q_grid values must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("q_grid must be strictly increasing")
        return grid

    @field_validator("sigma_h2_grid")
    @classmethod
    def _positive_variances(cls, grid: tuple[float, ...]) -> tuple[float, ...]:
        if any(s <= 0 for s in grid):
            raise ValueError("sigma_h2_grid values must be positive")
        return grid

    @model_validator(mode="after")
    def _k_fits(self) -> CampaignConfig:
        if self.k is not None and self.k > self.N:
            raise ValueError(f"k={self.k} exceeds blocklength {self.N}")
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        return self

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def K(self) -> int:
        return self.k if self.k is not None else round(self.rate * self.N)


class RunManifest(BaseModel):
    """Provenance record written next to every CLI output."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    command: str
    config: dict = Field(..., description="Fully resolved configuration")
    version: str
    master_seed: int | None = None
    run_id: str
    created_at: str
    outputs: list[str] = Field(default_factory=list)
    duration_seconds: float = 0.0
    diagnostics: dict = Field(default_factory=dict)
