"""Exactly constrained interface perturbation families in two dimensions.

The interface is the polar graph

    r(theta; t) = c(t) + t * a * cos(k * theta),      a = (pi R)^(-1/2),

whose normal speed at t = 0 is a*cos(k theta); the amplitude a makes the
squared speed integrate to 1/R over the unit circle, the normalization the
quadratic forms are stated in.  The center term c(t) enforces the constraint
exactly for every admissible t, not just to second order:

* volume:    c(t) = sqrt(R^2 - t^2 a^2 / 2) keeps the enclosed area pi R^2,
* perimeter: c(t) is found by bisection so the curve length stays 2 pi R.

Admissibility keeps the curve inside the unit disk and away from the origin:
|t| a < min(1 - R, 0.7 R).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from ..analytic import BallGeometry, Constraint, Medium, _as_constraint

__all__ = ["PerturbationFamily", "build_family"]

_LENGTH_QUAD_POINTS = 2048
_BISECT_XTOL = 1e-13


def _polar_curve_length(center: float, wiggle: float, k: int) -> float:
    """Length of r(theta) = center + wiggle*cos(k theta) via the periodic trapezoid rule."""
    theta = np.linspace(0.0, 2.0 * math.pi, _LENGTH_QUAD_POINTS, endpoint=False)
    r = center + wiggle * np.cos(k * theta)
    dr = -wiggle * k * np.sin(k * theta)
    return float(np.mean(np.sqrt(r * r + dr * dr))) * 2.0 * math.pi


@dataclass
class PerturbationFamily:
    """Mode-k interface family under an exact volume or perimeter constraint."""

    geometry: BallGeometry
    k: int
    amplitude: float
    constraint: Constraint
    _perimeter_centers: dict = field(default_factory=dict, repr=False)

    @property
    def t_admissible(self) -> float:
        """Largest |t| the family accepts (interface stays inside, origin clear)."""
        R = self.geometry.radius
        return min(1.0 - R, 0.7 * R) / self.amplitude

    def _require_admissible(self, t: float) -> None:
        if not (abs(t) < self.t_admissible):
            raise ValueError(
                f"perturbation parameter t={t} out of admissible range "
                f"(|t| < {self.t_admissible:.6g})"
            )

    def center(self, t: float) -> float:
        """Center radius c(t) realizing the constraint exactly at parameter t."""
        self._require_admissible(t)
        R = self.geometry.radius
        wig = t * self.amplitude
        if self.constraint is Constraint.VOLUME:
            return math.sqrt(R * R - 0.5 * wig * wig)
        key = float(t)
        if key not in self._perimeter_centers:
            self._perimeter_centers[key] = self._solve_perimeter_center(wig)
        return self._perimeter_centers[key]

    def _solve_perimeter_center(self, wiggle: float) -> float:
        R = self.geometry.radius
        target = 2.0 * math.pi * R
        if wiggle == 0.0:
            return R

        def gap(c):
            return _polar_curve_length(c, wiggle, self.k) - target

        # Adding wiggle lengthens the curve, so the root sits at c <= R.
        hi = R
        lo = R - max(0.5 * (wiggle * self.k) ** 2 / R, 1e-8)
        while gap(lo) > 0.0:
            lo = R - 2.0 * (R - lo)
            if lo <= abs(wiggle):
                raise ValueError(
                    "no perimeter-preserving center radius for this amplitude"
                )
        return float(bisect(gap, lo, hi, xtol=_BISECT_XTOL))

    def radius(self, theta, t: float):
        """Interface radius r(theta; t); theta may be an array."""
        c = self.center(t)
        th = np.asarray(theta, dtype=float)
        out = c + t * self.amplitude * np.cos(self.k * th)
        return float(out) if np.isscalar(theta) or out.ndim == 0 else out

    def normal_speed(self, theta):
        """Normal speed of the interface at t = 0 (shared by both constraints)."""
        th = np.asarray(theta, dtype=float)
        out = self.amplitude * np.cos(self.k * th)
        return float(out) if np.isscalar(theta) or out.ndim == 0 else out

    def enclosed_area(self, t: float, quad_points: int = _LENGTH_QUAD_POINTS) -> float:
        """Area enclosed by the curve, (1/2) int r^2 dtheta (periodic trapezoid)."""
        theta = np.linspace(0.0, 2.0 * math.pi, quad_points, endpoint=False)
        r = self.radius(theta, t)
        return float(np.mean(r * r)) * math.pi

    def curve_length(self, t: float) -> float:
        """Arc length of the interface curve at parameter t."""
        return _polar_curve_length(self.center(t), t * self.amplitude, self.k)


def build_family(
    geom: BallGeometry, medium: Medium, k: int, constraint
) -> PerturbationFamily:
    """Construct the mode-k family for the planar (dim = 2) configuration.

    ``medium`` is validated for interface compatibility but the family itself
    is purely geometric.
    """
    if geom.dim != 2:
        raise ValueError(f"perturbation families are planar only (dim=2), got dim={geom.dim}")
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise ValueError(f"mode order must be an integer >= 1, got {k}")
    if not isinstance(medium, Medium):
        raise ValueError("medium must be a Medium instance")
    amplitude = 1.0 / math.sqrt(math.pi * geom.radius)
    return PerturbationFamily(
        geometry=geom, k=int(k), amplitude=amplitude, constraint=_as_constraint(constraint)
    )
