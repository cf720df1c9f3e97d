"""Channel-gain distributions F_H for i.i.d. fast fading.

Every model exposes a sampler that takes the caller's
``numpy.random.Generator``, the CDF and density of the real gain H, and
the two fading functionals the inversion policy needs: the erasure mass
P(|H| < δ) and the truncated inverse-square moment E[H⁻²; |H| ≥ δ].
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy import special

from polarfade.exceptions import InvalidArgumentError
from polarfade.models import QuadratureSpec
from polarfade.services.quadrature import integrate_scalar

# Tail mass ignored when truncating unbounded gain distributions.
_TAIL_MASS = 1e-12

# Thresholds sampled when deciding whether E[H⁻²] diverges at δ = 0.
_DIVERGENCE_POINTS = (1e-4, 1e-8)
_DIVERGENCE_REL_GROWTH = 1e-3

# Breakpoints in t = 1/h so long integration ranges still resolve the
# region where the density varies.
_T_BREAKPOINTS = tuple(10.0**k for k in range(9))


class FadingModel(ABC):
    """Distribution of the real channel gain H."""

    kind: str

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Draw i.i.d. gains from *rng*."""

    @abstractmethod
    def cdf(self, h: float) -> float: ...

    @abstractmethod
    def pdf(self, h: float) -> float: ...

    @abstractmethod
    def abs_support(self) -> tuple[float, float]:
        """Bounds (lo, hi) on |H| used to truncate integrals."""

    @property
    @abstractmethod
    def spec(self) -> str:
        """Round-trippable text form accepted by :func:`parse_fading`."""

    @property
    @abstractmethod
    def mean_square(self) -> float:
        """E[H²]."""

    def erasure_mass(self, delta: float) -> float:
        """P(|H| < δ)."""
        if delta <= 0:
            return 0.0
        return min(1.0, max(0.0, self.cdf(delta) - self.cdf(-delta)))

    def _inverse_square_density(self, t: float) -> float:
        # After h = 1/t the integrand h⁻² f(h) dh becomes f(1/t) dt.
        if t <= 0:
            return 0.0
        h = 1.0 / t
        return self.pdf(h) + self.pdf(-h)

    def _truncated_moment(self, delta: float, quad: QuadratureSpec) -> float:
        lo, hi = self.abs_support()
        lower = max(delta, lo)
        if lower >= hi:
            return 0.0
        return integrate_scalar(
            self._inverse_square_density, 1.0 / hi, 1.0 / lower, quad, points=_T_BREAKPOINTS
        )

    def inverse_square_moment(self, delta: float, quad: QuadratureSpec) -> float:
        """E[H⁻²; |H| ≥ δ]; ``math.inf`` when it diverges at δ = 0."""
        if delta < 0:
            raise InvalidArgumentError(f"delta must be nonnegative, got {delta}")
        lo, _ = self.abs_support()
        if delta > 0 or lo > 0:
            return self._truncated_moment(delta, quad)

        if self.pdf(0.0) > 0:
            return math.inf
        near, nearer = (self._truncated_moment(p, quad) for p in _DIVERGENCE_POINTS)
        if nearer - near > _DIVERGENCE_REL_GROWTH * max(near, 1.0):
            return math.inf
        return nearer


@dataclass(frozen=True)
class GaussianFading(FadingModel):
    """Real Gaussian gain H ~ N(0, σ_H²); gains may be negative."""

    sigma_h2: float = 1.0
    kind = "gaussian"

    def __post_init__(self) -> None:
        if not self.sigma_h2 > 0:
            raise InvalidArgumentError(f"sigma_h2 must be positive, got {self.sigma_h2}")

    @property
    def _scale(self) -> float:
        return math.sqrt(self.sigma_h2)

    def sample(self, rng, size=None):
        return rng.normal(0.0, self._scale, size)

    def cdf(self, h):
        return float(special.ndtr(h / self._scale))

    def pdf(self, h):
        return math.exp(-0.5 * h * h / self.sigma_h2) / math.sqrt(2.0 * math.pi * self.sigma_h2)

    def abs_support(self):
        return 0.0, self._scale * float(special.ndtri(1.0 - _TAIL_MASS / 2.0))

    @property
    def spec(self):
        return f"gaussian:{self.sigma_h2!r}"

    @property
    def mean_square(self):
        return self.sigma_h2


@dataclass(frozen=True)
class RayleighFading(FadingModel):
    """Nonnegative Rayleigh-distributed gain with the given scale."""

    scale: float = 1.0
    kind = "rayleigh"

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise InvalidArgumentError(f"scale must be positive, got {self.scale}")

    def sample(self, rng, size=None):
        return rng.rayleigh(self.scale, size)

    def cdf(self, h):
        if h <= 0:
            return 0.0
        return -math.expm1(-0.5 * (h / self.scale) ** 2)

    def pdf(self, h):
        if h <= 0:
            return 0.0
        s2 = self.scale * self.scale
        return h / s2 * math.exp(-0.5 * h * h / s2)

    def abs_support(self):
        return 0.0, self.scale * math.sqrt(-2.0 * math.log(_TAIL_MASS))

    @property
    def spec(self):
        return f"rayleigh:{self.scale!r}"

    @property
    def mean_square(self):
        return 2.0 * self.scale * self.scale


@dataclass(frozen=True)
class UniformAbsFading(FadingModel):
    """|H| uniform on [a, b] with an independent fair random sign."""

    a: float = 1.0
    b: float = 2.0
    kind = "uniform"

    def __post_init__(self) -> None:
        if not 0 <= self.a < self.b:
            raise InvalidArgumentError(f"need 0 <= a < b, got a={self.a}, b={self.b}")

    def sample(self, rng, size=None):
        magnitude = rng.uniform(self.a, self.b, size)
        sign = rng.choice((-1.0, 1.0), size)
        return magnitude * sign

    def _abs_cdf(self, x: float) -> float:
        return min(1.0, max(0.0, (x - self.a) / (self.b - self.a)))

    def cdf(self, h):
        if h >= 0:
            return 0.5 + 0.5 * self._abs_cdf(h)
        return 0.5 - 0.5 * self._abs_cdf(-h)

    def pdf(self, h):
        return 0.5 / (self.b - self.a) if self.a <= abs(h) <= self.b else 0.0

    def abs_support(self):
        return self.a, self.b

    @property
    def spec(self):
        return f"uniform:{self.a!r},{self.b!r}"

    @property
    def mean_square(self):
        return (self.a**2 + self.a * self.b + self.b**2) / 3.0


@dataclass(frozen=True)
class PointMassFading(FadingModel):
    """Deterministic gain h0; inversion at |h0| ≥ δ is a fixed rescaling.

    The density is reported as 0 everywhere; the fading functionals are
    evaluated exactly on the atom.
    """

    h0: float = 1.0
    kind = "point"

    def __post_init__(self) -> None:
        if self.h0 == 0:
            raise InvalidArgumentError("h0 must be nonzero")

    def sample(self, rng, size=None):
        # Consumes no randomness, so seeded streams line up with plain AWGN runs.
        if size is None:
            return self.h0
        return np.full(size, self.h0, dtype=np.float64)

    def cdf(self, h):
        return 1.0 if h >= self.h0 else 0.0

    def pdf(self, h):
        return 0.0

    def abs_support(self):
        return abs(self.h0), abs(self.h0)

    def erasure_mass(self, delta):
        return 1.0 if abs(self.h0) < delta else 0.0

    def inverse_square_moment(self, delta, quad):
        if delta < 0:
            raise InvalidArgumentError(f"delta must be nonnegative, got {delta}")
        return 1.0 / (self.h0 * self.h0) if abs(self.h0) >= delta else 0.0

    @property
    def spec(self):
        return f"point:{self.h0!r}"

    @property
    def mean_square(self):
        return self.h0 * self.h0


_FADING_KINDS: dict[str, tuple[type[FadingModel], int]] = {
    "gaussian": (GaussianFading, 1),
    "rayleigh": (RayleighFading, 1),
    "point": (PointMassFading, 1),
    "uniform": (UniformAbsFading, 2),
}


def parse_fading(text: str) -> FadingModel:
    """Parse ``kind:param[,param]``, e.g. ``gaussian:1.0`` or ``uniform:1,2``."""
    kind, sep, params = text.strip().partition(":")
    kind = kind.strip().lower()
    if kind not in _FADING_KINDS:
        raise InvalidArgumentError(
            f"unknown fading kind {kind!r}; expected one of {sorted(_FADING_KINDS)}"
        )
    cls, arity = _FADING_KINDS[kind]
    if not sep:
        return cls()
    try:
        values = [float(v) for v in params.split(",")]
    except ValueError as exc:
        raise InvalidArgumentError(f"bad fading parameters in {text!r}") from exc
    if len(values) != arity:
        raise InvalidArgumentError(f"{kind} fading takes {arity} parameter(s), got {text!r}")
    return cls(*values)
