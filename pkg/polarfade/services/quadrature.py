"""Adaptive quadrature shared by the capacity and power-control integrals."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence

from scipy import integrate

from polarfade.exceptions import NumericError
from polarfade.models import QuadratureSpec
from polarfade.services.metrics import metrics

logger = logging.getLogger(__name__)

# Relative tolerance paired with QuadratureSpec.abs_tol; QUADPACK stops at
# whichever of the two is looser.
_REL_TOL = 1e-12

# QUADPACK warnings whose error estimate still lands within this factor of
# the requested tolerance are accepted (roundoff at the tolerance floor).
_ACCEPT_FACTOR = 1e3


def integrate_scalar(
    func: Callable[[float], float],
    a: float,
    b: float,
    quad: QuadratureSpec,
    points: Sequence[float] | None = None,
) -> float:
    """Integrate *func* over the finite interval [a, b].

    Raises :class:`NumericError` carrying the achieved error estimate when
    QUADPACK reports non-convergence.
    """
    if b <= a:
        return 0.0
    inner = [p for p in (points or ()) if a < p < b] or None
    result = integrate.quad(
        func,
        a,
        b,
        epsabs=quad.abs_tol,
        epsrel=_REL_TOL,
        limit=quad.max_subdivisions,
        points=inner,
        full_output=1,
    )
    value, abs_error = result[0], result[1]
    metrics.inc_quadrature()

    if len(result) > 3:
        target = max(quad.abs_tol, _REL_TOL * abs(value))
        if abs_error > _ACCEPT_FACTOR * target:
            raise NumericError(
                f"quadrature on [{a:.6g}, {b:.6g}] did not converge: {result[3].strip()}",
                abs_error=abs_error,
            )
        logger.debug("Accepted quadrature warning (abs_error=%.3g): %s", abs_error, result[3])
    return value
