"""Circular densities on [0, 2*pi) and their torus-area-weighted variants.

Every density is stored as an unnormalized kernel plus a separately computed
normalizing constant: closed-form where one is known, numeric quadrature
otherwise.  The poloidal angle of an area-uniform torus point follows the
tilted density (1 + a*cos(theta))/(2*pi), and any circular marginal proposed
for that angle picks up the same (1 + a*cos(theta)) weight.
"""

from __future__ import annotations

import cmath
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .geometry import TWO_PI, wrap_angle
from .special_functions import QuadratureSpec, bessel_i, periodic_integral

__all__ = [
    "CircularDensity",
    "CircularUniform",
    "AreaUniformMarginal",
    "VonMises",
    "WrappedCauchy",
    "KatoJones",
    "TorusWeighted",
    "area_uniform_cdf",
    "von_mises_torus_normalizer",
    "numeric_normalizer",
    "kato_jones_params",
    "mobius_shift",
    "grid_modes",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class CircularDensity(ABC):
    """A probability density on the circle, represented as kernel/normalizer.

    Subclasses provide the unnormalized ``kernel`` and its ``normalizer``;
    ``evaluate`` is their quotient.  ``cdf`` is None unless the subclass has
    a closed form.  ``modes`` lists the local maxima of ``evaluate`` and
    ``stationary_points`` at least the critical points relevant to envelope
    construction.
    """

    support: tuple[float, float] = (0.0, TWO_PI)
    cdf = None

    @abstractmethod
    def kernel(self, theta: np.ndarray) -> np.ndarray:
        """Unnormalized density values."""

    @property
    @abstractmethod
    def normalizer(self) -> float:
        """Integral of the kernel over one period."""

    @property
    @abstractmethod
    def modes(self) -> tuple[float, ...]:
        """Locations of local maxima; empty for a constant density."""

    @property
    def stationary_points(self) -> tuple[float, ...]:
        return self.modes

    def evaluate(self, theta):
        return self.kernel(np.asarray(theta, dtype=float)) / self.normalizer

    def log_evaluate(self, theta):
        with np.errstate(divide="ignore"):
            return np.log(self.evaluate(theta))


@dataclass(frozen=True)
class CircularUniform(CircularDensity):
    """The flat density 1/(2*pi)."""

    def kernel(self, theta):
        return np.ones_like(np.asarray(theta, dtype=float))

    @property
    def normalizer(self) -> float:
        return TWO_PI

    @property
    def modes(self) -> tuple[float, ...]:
        return ()

    def cdf(self, theta):
        return np.asarray(theta, dtype=float) / TWO_PI


@dataclass(frozen=True)
class AreaUniformMarginal(CircularDensity):
    """Poloidal-angle density (1 + a*cos(theta))/(2*pi) of an area-uniform draw.

    The aspect ratio a = r/R tilts mass toward the outer equator theta = 0.
    """

    aspect: float

    def __post_init__(self):
        _check_aspect(self.aspect)

    def kernel(self, theta):
        return 1.0 + self.aspect * np.cos(np.asarray(theta, dtype=float))

    @property
    def normalizer(self) -> float:
        return TWO_PI

    @property
    def modes(self) -> tuple[float, ...]:
        return (0.0,)

    @property
    def stationary_points(self) -> tuple[float, ...]:
        return (0.0, np.pi)

    def cdf(self, theta):
        return area_uniform_cdf(theta, self.aspect)


@dataclass(frozen=True)
class VonMises(CircularDensity):
    """Von Mises density exp(kappa*cos(theta - mu)) / (2*pi*I0(kappa))."""

    mu: float
    kappa: float

    def __post_init__(self):
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        object.__setattr__(self, "mu", float(wrap_angle(self.mu)))
        object.__setattr__(self, "_norm", TWO_PI * bessel_i(0, self.kappa))

    def kernel(self, theta):
        return np.exp(self.kappa * np.cos(np.asarray(theta, dtype=float) - self.mu))

    @property
    def normalizer(self) -> float:
        return self._norm

    @property
    def modes(self) -> tuple[float, ...]:
        return (self.mu,)

    @property
    def stationary_points(self) -> tuple[float, ...]:
        return (self.mu, float(wrap_angle(self.mu + np.pi)))

    def log_evaluate(self, theta):
        return self.kappa * np.cos(np.asarray(theta, dtype=float) - self.mu) - np.log(
            self.normalizer
        )


@dataclass(frozen=True)
class WrappedCauchy(CircularDensity):
    """Wrapped Cauchy density with location mu and concentration rho in [0, 1)."""

    mu: float
    rho: float

    def __post_init__(self):
        if not (0.0 <= self.rho < 1.0):
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        object.__setattr__(self, "mu", float(wrap_angle(self.mu)))

    def kernel(self, theta):
        theta = np.asarray(theta, dtype=float)
        return (1.0 - self.rho**2) / (
            1.0 + self.rho**2 - 2.0 * self.rho * np.cos(theta - self.mu)
        )

    @property
    def normalizer(self) -> float:
        return TWO_PI

    @property
    def modes(self) -> tuple[float, ...]:
        return () if self.rho == 0.0 else (self.mu,)

    @property
    def stationary_points(self) -> tuple[float, ...]:
        if self.rho == 0.0:
            return ()
        return (self.mu, float(wrap_angle(self.mu + np.pi)))


@dataclass(frozen=True)
class KatoJones(CircularDensity):
    """Four-parameter circular family from a Moebius shift of a von Mises draw.

    Parameters are location mu, shift angle nu, concentration rho in [0, 1)
    for the Moebius part and kappa > 0 for the von Mises part.  The density is

        (1 - rho^2) / (2*pi*I0(kappa) * D(theta)) *
            exp(kappa * (xi*cos(theta - eta) - 2*rho*cos(nu)) / D(theta)),
        D(theta) = 1 + rho^2 - 2*rho*cos(theta - gamma),

    with (gamma, xi, eta) the derived parameters of ``kato_jones_params``.
    """

    mu: float
    nu: float
    rho: float
    kappa: float

    def __post_init__(self):
        if not (0.0 <= self.rho < 1.0):
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        object.__setattr__(self, "mu", float(wrap_angle(self.mu)))
        gamma, xi, eta = kato_jones_params(self.mu, self.nu, self.rho)
        object.__setattr__(self, "_gamma", gamma)
        object.__setattr__(self, "_xi", xi)
        object.__setattr__(self, "_eta", eta)
        object.__setattr__(self, "_norm", TWO_PI * bessel_i(0, self.kappa))
        object.__setattr__(self, "_modes", None)

    @property
    def derived_params(self) -> tuple[float, float, float]:
        """(gamma, xi, eta) entering the closed-form density."""
        return (self._gamma, self._xi, self._eta)

    def kernel(self, theta):
        theta = np.asarray(theta, dtype=float)
        denom = 1.0 + self.rho**2 - 2.0 * self.rho * np.cos(theta - self._gamma)
        tilt = (
            self.kappa
            * (self._xi * np.cos(theta - self._eta) - 2.0 * self.rho * np.cos(self.nu))
            / denom
        )
        return (1.0 - self.rho**2) / denom * np.exp(tilt)

    @property
    def normalizer(self) -> float:
        return self._norm

    @property
    def modes(self) -> tuple[float, ...]:
        if self._modes is None:
            object.__setattr__(self, "_modes", grid_modes(self.evaluate))
        return self._modes


class TorusWeighted(CircularDensity):
    """A circular base density reweighted by the torus area factor.

    kernel(theta) = base(theta) * (1 + aspect*cos(theta)); the normalizer is
    closed-form for a von Mises base and numeric quadrature otherwise.
    """

    def __init__(self, base: CircularDensity, aspect: float):
        _check_aspect(aspect)
        self.base = base
        self.aspect = aspect
        if isinstance(base, VonMises):
            self._norm = von_mises_torus_normalizer(
                base.kappa, base.mu, aspect
            ) / base.normalizer
        else:
            self._norm = numeric_normalizer(base, aspect)
        self._modes = None

    def __repr__(self):
        return f"TorusWeighted(base={self.base!r}, aspect={self.aspect})"

    def kernel(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.base.evaluate(theta) * (1.0 + self.aspect * np.cos(theta))

    @property
    def normalizer(self) -> float:
        return self._norm

    @property
    def modes(self) -> tuple[float, ...]:
        if self._modes is None:
            self._modes = grid_modes(self.evaluate)
        return self._modes


def _check_aspect(aspect: float) -> None:
    if not (np.isfinite(aspect) and 0.0 < aspect <= 1.0):
        raise ValueError(f"aspect ratio must lie in (0, 1], got {aspect}")


def area_uniform_cdf(theta, aspect: float):
    """CDF (theta + a*sin(theta)) / (2*pi) of the area-uniform poloidal angle."""
    _check_aspect(aspect)
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0.0) or np.any(theta > TWO_PI):
        raise ValueError("theta must lie in [0, 2*pi]")
    return (theta + aspect * np.sin(theta)) / TWO_PI


def von_mises_torus_normalizer(kappa: float, mu: float, aspect: float) -> float:
    """Closed-form integral of exp(kappa*cos(t - mu)) * (1 + a*cos(t)).

    Equals 2*pi*(I0(kappa) + a*cos(mu)*I1(kappa)): expanding cos(t) around mu
    kills the sine term by symmetry and leaves the first two Bessel moments.
    """
    if not (np.isfinite(kappa) and kappa > 0):
        raise ValueError(f"kappa must be positive, got {kappa}")
    _check_aspect(aspect)
    return TWO_PI * (
        bessel_i(0, kappa) + aspect * math.cos(mu) * bessel_i(1, kappa)
    )


def numeric_normalizer(
    base: CircularDensity, aspect: float, spec: QuadratureSpec | None = None
) -> float:
    """Quadrature integral of base(theta) * (1 + aspect*cos(theta))."""
    _check_aspect(aspect)
    return periodic_integral(
        lambda t: base.evaluate(t) * (1.0 + aspect * np.cos(t)), spec
    )


def kato_jones_params(mu: float, nu: float, rho: float) -> tuple[float, float, float]:
    """Derived parameters (gamma, xi, eta) of the Moebius-shifted family.

    gamma = mu + nu; xi and eta are the modulus and mu-shifted argument of the
    complex number 1 + rho^2 * exp(2i*nu).
    """
    if not (0.0 <= rho < 1.0):
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    w = 1.0 + rho**2 * cmath.exp(2j * nu)
    return (mu + nu, abs(w), mu + cmath.phase(w))


def mobius_shift(theta, mu: float, nu: float, rho: float):
    """Moebius transform sending a centered von Mises angle into its shifted family.

    theta -> mu + nu + 2*arctan(((1 - rho)/(1 + rho)) * tan((theta - nu)/2)),
    wrapped into [0, 2*pi).  With rho = 0 this is a rigid rotation by mu.
    """
    if not (0.0 <= rho < 1.0):
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    theta = np.asarray(theta, dtype=float)
    # center theta - nu into [-pi, pi) so tan(d/2) stays on one branch
    d = np.mod(theta - nu + np.pi, TWO_PI) - np.pi
    shrink = (1.0 - rho) / (1.0 + rho)
    return wrap_angle(mu + nu + 2.0 * np.arctan(shrink * np.tan(d / 2.0)))


def grid_modes(
    evaluate, n_grid: int = 8192, tol: float = 1e-10
) -> tuple[float, ...]:
    """Locate local maxima of a periodic function by grid scan plus refinement.

    Scans a uniform grid over [0, 2*pi), takes every point that beats both
    cyclic neighbors, and sharpens each with golden-section search inside the
    bracketing grid cell pair.
    """
    step = TWO_PI / n_grid
    grid = np.arange(n_grid) * step
    values = np.asarray(evaluate(grid), dtype=float)
    is_peak = (values > np.roll(values, 1)) & (values >= np.roll(values, -1))
    found = []
    for idx in np.nonzero(is_peak)[0]:
        lo, hi = grid[idx] - step, grid[idx] + step
        while hi - lo > tol:
            left = hi - _GOLDEN * (hi - lo)
            right = lo + _GOLDEN * (hi - lo)
            if float(evaluate(left)) < float(evaluate(right)):
                lo = left
            else:
                hi = right
        found.append(float(wrap_angle(0.5 * (lo + hi))))
    return tuple(sorted(found))
