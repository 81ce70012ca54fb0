"""Modified Bessel functions of the first kind and periodic quadrature.

Self-contained numerics for the normalizing constants used elsewhere: an
integer-order Bessel I evaluator and fixed-rule quadrature over one period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import TWO_PI

__all__ = ["QuadratureSpec", "bessel_i", "periodic_integral"]

# Above this argument the power series needs many large terms; the large-z
# expansion is already at machine precision there.
_SERIES_CUTOFF = 40.0
_RULES = ("trapezoid-periodic", "composite-simpson")


@dataclass(frozen=True)
class QuadratureSpec:
    """Panel count and rule for integrals over [0, 2*pi]."""

    panels: int = 4096
    rule: str = "trapezoid-periodic"

    def __post_init__(self):
        if self.panels < 16 or self.panels % 2:
            raise ValueError(f"panels must be even and >= 16, got {self.panels}")
        if self.rule not in _RULES:
            raise ValueError(f"rule must be one of {_RULES}, got {self.rule!r}")


def bessel_i(order: int, kappa: float) -> float:
    """Modified Bessel function I_order(kappa) for integer order >= 0.

    Uses the ascending power series

        I_p(x) = sum_m (x/2)^(2m+p) / (m! (m+p)!)

    for moderate arguments and the large-argument expansion

        I_p(x) ~ e^x / sqrt(2 pi x) * sum_k c_k,
        c_0 = 1,  c_k = -c_{k-1} * (4 p^2 - (2k-1)^2) / (8 k x)

    beyond it.  Relative error stays below 1e-12 for kappa up to 120.
    """
    if not isinstance(order, (int, np.integer)) or order < 0:
        raise ValueError(f"order must be a non-negative integer, got {order!r}")
    kappa = float(kappa)
    if not np.isfinite(kappa) or kappa < 0:
        raise ValueError(f"argument must be finite and non-negative, got {kappa}")
    if kappa == 0.0:
        return 1.0 if order == 0 else 0.0
    if kappa <= _SERIES_CUTOFF:
        term = (kappa / 2.0) ** order / math.factorial(order)
        total = term
        m = 0
        while term > 1e-18 * total:
            m += 1
            term *= (kappa / 2.0) ** 2 / (m * (m + order))
            total += term
        return total
    coeff = 1.0
    total = 1.0
    mu = 4.0 * order * order
    for k in range(1, 40):
        coeff *= -(mu - (2 * k - 1) ** 2) / (8.0 * k * kappa)
        if abs(coeff) < 1e-18 * abs(total):
            break
        total += coeff
    return math.exp(kappa) / math.sqrt(TWO_PI * kappa) * total


def periodic_integral(
    f: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec | None = None
) -> float:
    """Integrate a vectorized function over [0, 2*pi] with a fixed rule.

    The trapezoid rule on a periodic uniform grid converges spectrally for
    smooth periodic integrands, which covers every density in this package;
    composite Simpson is available for non-periodic checks.
    """
    spec = spec or QuadratureSpec()
    if spec.rule == "trapezoid-periodic":
        nodes = np.arange(spec.panels) * (TWO_PI / spec.panels)
        return float(np.asarray(f(nodes), dtype=float).sum() * (TWO_PI / spec.panels))
    nodes = np.linspace(0.0, TWO_PI, spec.panels + 1)
    values = np.asarray(f(nodes), dtype=float)
    weights = np.ones(spec.panels + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float((TWO_PI / spec.panels) / 3.0 * (weights * values).sum())
