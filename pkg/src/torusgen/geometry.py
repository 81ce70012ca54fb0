"""Ring-torus geometry: embedding, surface measure, and area partitions.

The surface is parameterized by two angles.  theta1 runs around the central
axis (toroidal direction), theta2 runs around the tube (poloidal direction).
All angles live on [0, 2*pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

__all__ = [
    "TWO_PI",
    "AnglePair",
    "Point3",
    "TorusGeometry",
    "wrap_angle",
    "embed",
    "embed_angles",
    "surface_residual",
    "area_element",
    "surface_area_quadrature",
    "quadrant_area_proportions",
]


def wrap_angle(theta):
    """Reduce an angle (scalar or array) into [0, 2*pi)."""
    return np.mod(theta, TWO_PI)


@dataclass(frozen=True)
class AnglePair:
    """A single point on the parameter square, wrapped into [0, 2*pi)^2."""

    theta1: float
    theta2: float

    def __post_init__(self):
        object.__setattr__(self, "theta1", float(wrap_angle(self.theta1)))
        object.__setattr__(self, "theta2", float(wrap_angle(self.theta2)))


@dataclass(frozen=True)
class Point3:
    """A point in 3-space."""

    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class TorusGeometry:
    """Ring torus with major radius (center of tube) and minor radius (tube).

    The aspect ratio minor/major must lie in (0, 1]; equality gives the horn
    torus where the inner circle pinches to a point.
    """

    major_radius: float
    minor_radius: float

    def __post_init__(self):
        if not (self.major_radius > 0 and np.isfinite(self.major_radius)):
            raise ValueError(f"major radius must be positive, got {self.major_radius}")
        if not (self.minor_radius > 0 and np.isfinite(self.minor_radius)):
            raise ValueError(f"minor radius must be positive, got {self.minor_radius}")
        if self.minor_radius > self.major_radius:
            raise ValueError(
                "minor radius must not exceed major radius "
                f"(got r={self.minor_radius}, R={self.major_radius})"
            )

    @property
    def aspect(self) -> float:
        """Aspect ratio r/R in (0, 1]."""
        return self.minor_radius / self.major_radius

    @property
    def surface_area(self) -> float:
        """Closed-form total area 4*pi^2*r*R."""
        return 4.0 * np.pi**2 * self.minor_radius * self.major_radius


def embed(pair: AnglePair, geometry: TorusGeometry) -> Point3:
    """Map one angle pair to its point on the torus surface."""
    xyz = embed_angles(pair.theta1, pair.theta2, geometry)
    return Point3(float(xyz[..., 0]), float(xyz[..., 1]), float(xyz[..., 2]))


def embed_angles(theta1, theta2, geometry: TorusGeometry) -> np.ndarray:
    """Vectorized embedding; returns an array with a trailing axis of size 3.

    x = (R + r cos theta2) cos theta1
    y = (R + r cos theta2) sin theta1
    z = r sin theta2
    """
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    ring = geometry.major_radius + geometry.minor_radius * np.cos(theta2)
    return np.stack(
        [
            ring * np.cos(theta1),
            ring * np.sin(theta1),
            geometry.minor_radius * np.sin(theta2),
        ],
        axis=-1,
    )


def surface_residual(points: np.ndarray, geometry: TorusGeometry) -> np.ndarray:
    """Signed defect of the implicit torus equation, zero on the surface.

    (sqrt(x^2 + y^2) - R)^2 + z^2 - r^2
    """
    points = np.asarray(points, dtype=float)
    radial = np.hypot(points[..., 0], points[..., 1]) - geometry.major_radius
    return radial**2 + points[..., 2] ** 2 - geometry.minor_radius**2


def area_element(theta2, geometry: TorusGeometry) -> np.ndarray:
    """Surface-measure density r*(R + r cos theta2) for dA = |dx/du x dx/dv|.

    Independent of theta1 by rotational symmetry.
    """
    theta2 = np.asarray(theta2, dtype=float)
    return geometry.minor_radius * (
        geometry.major_radius + geometry.minor_radius * np.cos(theta2)
    )


def _simpson(values: np.ndarray, h: float) -> float:
    """Composite Simpson rule over an odd-length array of equally spaced nodes."""
    weights = np.ones(len(values))
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(h / 3.0 * (weights * values).sum())


def surface_area_quadrature(geometry: TorusGeometry, panels: int = 4096) -> float:
    """Total area by composite Simpson quadrature of the area element.

    The integrand does not depend on theta1, so the theta1 axis contributes a
    factor 2*pi exactly and only the theta2 axis needs numerical treatment.
    """
    if panels < 2 or panels % 2:
        raise ValueError(f"panels must be a positive even count, got {panels}")
    theta2 = np.linspace(0.0, TWO_PI, panels + 1)
    inner = _simpson(area_element(theta2, geometry), TWO_PI / panels)
    return TWO_PI * inner


def quadrant_area_proportions(geometry: TorusGeometry) -> np.ndarray:
    """Fraction of total surface area in each of the 16 angle quadrants.

    Entry [i, j] covers theta1 in [i*pi/2, (i+1)*pi/2) and theta2 in
    [j*pi/2, (j+1)*pi/2).  Rows are equal by symmetry; columns follow the
    antiderivative of the area element, r*(R*t + r*sin(t)).
    """
    bounds = np.arange(5) * (np.pi / 2.0)
    anti = geometry.minor_radius * (
        geometry.major_radius * bounds + geometry.minor_radius * np.sin(bounds)
    )
    column = np.diff(anti) * TWO_PI / geometry.surface_area
    return np.tile(column / 4.0, (4, 1))
