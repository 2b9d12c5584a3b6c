"""Closed-form shape analysis of the concentric two-phase torsion problem.

The configuration is the unit ball in R^N filled with a material of
conductivity ``sigma_plus``, containing a concentric ball of radius
``R`` in ``(0, 1)`` with conductivity ``sigma_minus``.  The stress function
solves ``-div(sigma grad u) = 1`` with ``u = 0`` on the unit sphere and is
piecewise radial:

    u(r) = (1 - R^2)/(2 N sigma_plus) + (R^2 - r^2)/(2 N sigma_minus),  r <= R
    u(r) = (1 - r^2)/(2 N sigma_plus),                                  r >= R

Perturbing the interface along a degree-k spherical harmonic (normalized so
that the squared harmonic integrates to R^(1-N) over the unit sphere) while
preserving volume, respectively surface area, expands the torsional rigidity
as

    E(t) = E_0 + t^2 * Q(k)  + o(t^2)        (volume preserving)
    E(t) = E_0 + t^2 * Qt(k) + o(t^2)        (surface area preserving)

This module evaluates Q, Qt, the mode coefficients behind them, and the
resulting classification of the concentric shape (local maximizer / saddle /
degenerate).  All quantities are nondimensional.

Numerical note: the raw closed forms contain R^(2-N-k) factors that overflow
for large k.  Internally every formula is rescaled by R^(k+N-2) so that the
only k-dependent factor is s = R^(2k+N-2) in (0, 1); large-k evaluation then
underflows harmlessly to the correct limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import DegenerateDenominatorError

__all__ = [
    "Medium",
    "BallGeometry",
    "Mode",
    "ModeCoefficients",
    "StressProfile",
    "QuadraticFormValue",
    "Classification",
    "Constraint",
    "Verdict",
    "stress_function",
    "stress_gradient",
    "torsional_rigidity_concentric",
    "unit_sphere_area",
    "harmonic_data",
    "solve_mode_coefficients",
    "b_coefficient",
    "q_volume",
    "q_volume_values",
    "q_perimeter",
    "q_perimeter_values",
    "j_function",
    "classify",
    "volume_sap_coefficient",
    "RHO_DEGENERATE_RTOL",
    "CRITICAL_MODE_CAP",
]

# Conductivity ratios closer to 1 than this are treated as a single phase.
RHO_DEGENERATE_RTOL = 1e-12

# Hard cap for the linear scan that locates the first sign change of Q / Qt.
CRITICAL_MODE_CAP = 10**6

_DENOMINATOR_GUARD_RTOL = 1e-14


class Constraint(Enum):
    VOLUME = "volume"
    PERIMETER = "perimeter"


class Verdict(Enum):
    LOCAL_MAXIMIZER = "local_maximizer"
    SADDLE = "saddle"
    DEGENERATE = "degenerate"


def _as_constraint(constraint: Union[str, Constraint]) -> Constraint:
    if isinstance(constraint, Constraint):
        return constraint
    try:
        return Constraint(str(constraint).lower())
    except ValueError:
        raise ValueError(
            f"unknown constraint {constraint!r}; expected 'volume' or 'perimeter'"
        ) from None


@dataclass(frozen=True)
class Medium:
    """Two positive conductivities: ``sigma_minus`` inside, ``sigma_plus`` outside."""

    sigma_minus: float
    sigma_plus: float

    def __post_init__(self):
        if not (self.sigma_minus > 0 and math.isfinite(self.sigma_minus)):
            raise ValueError(f"sigma_minus must be positive, got {self.sigma_minus}")
        if not (self.sigma_plus > 0 and math.isfinite(self.sigma_plus)):
            raise ValueError(f"sigma_plus must be positive, got {self.sigma_plus}")

    @property
    def rho(self) -> float:
        """Conductivity ratio sigma_minus / sigma_plus."""
        return self.sigma_minus / self.sigma_plus

    @property
    def is_degenerate(self) -> bool:
        """True when both phases are (numerically) identical."""
        return abs(self.sigma_minus - self.sigma_plus) <= RHO_DEGENERATE_RTOL * max(
            self.sigma_minus, self.sigma_plus
        )


@dataclass(frozen=True)
class BallGeometry:
    """Unit ball in dimension ``dim`` with concentric interface at ``radius``."""

    dim: int
    radius: float

    def __post_init__(self):
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 2):
            raise ValueError(f"dim must be an integer >= 2, got {self.dim}")
        if not (0.0 < self.radius < 1.0):
            raise ValueError(f"radius must lie in (0, 1), got {self.radius}")

    @property
    def mean_curvature(self) -> float:
        """Mean curvature of the interface sphere, (N - 1)/R."""
        return (self.dim - 1) / self.radius


@dataclass(frozen=True)
class Mode:
    """Spherical-harmonic mode data for degree ``k`` in dimension N.

    ``lam`` is the Laplace-Beltrami eigenvalue k(k+N-2), ``multiplicity`` the
    dimension of the eigenspace, and (eta, xi) the two radial exponents of
    separated harmonic solutions r^eta, r^xi.
    """

    k: int
    lam: float
    multiplicity: int
    eta: float
    xi: float


@dataclass(frozen=True)
class ModeCoefficients:
    """Radial coefficients of the mode-k first variation of the stress function.

    Inside the interface the variation is b * r^k; outside it is
    c * r^(2-N-k) + d * r^k, with c + d = 0 enforcing the outer Dirichlet
    condition.
    """

    b: float
    c: float
    d: float


@dataclass(frozen=True)
class QuadraticFormValue:
    constraint: Constraint
    k: float
    value: float


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    critical_mode: Optional[int] = None


@dataclass(frozen=True)
class StressProfile:
    """Radial stress function for a fixed geometry and medium (callable in r)."""

    geometry: BallGeometry
    medium: Medium

    def __call__(self, r):
        return stress_function(self.geometry, self.medium, r)

    def gradient(self, r, phase: str = "auto"):
        return stress_gradient(self.geometry, self.medium, r, phase=phase)


def stress_function(geom: BallGeometry, medium: Medium, r):
    """Evaluate the piecewise-radial stress function at radius ``r`` in [0, 1].

    Accepts a scalar or an array; raises ``ValueError`` outside [0, 1].
    """
    rr = np.asarray(r, dtype=float)
    if np.any(rr < 0.0) or np.any(rr > 1.0):
        raise ValueError("radius outside [0, 1]")
    n, R = geom.dim, geom.radius
    sm, sp = medium.sigma_minus, medium.sigma_plus
    inner = (1.0 - R * R) / (2.0 * n * sp) + (R * R - rr * rr) / (2.0 * n * sm)
    outer = (1.0 - rr * rr) / (2.0 * n * sp)
    out = np.where(rr <= R, inner, outer)
    return float(out) if np.isscalar(r) or out.ndim == 0 else out


def stress_gradient(geom: BallGeometry, medium: Medium, r, phase: str = "auto"):
    """Radial derivative of the stress function.

    ``phase`` selects the branch at the interface: "inner", "outer", or
    "auto" (inner branch for r <= R).  Away from r = R both choices agree
    with the one-sided derivative of the active branch.
    """
    rr = np.asarray(r, dtype=float)
    if np.any(rr < 0.0) or np.any(rr > 1.0):
        raise ValueError("radius outside [0, 1]")
    if phase not in ("auto", "inner", "outer"):
        raise ValueError(f"phase must be 'auto', 'inner' or 'outer', got {phase!r}")
    n, R = geom.dim, geom.radius
    grad_in = -rr / (n * medium.sigma_minus)
    grad_out = -rr / (n * medium.sigma_plus)
    if phase == "inner":
        out = grad_in
    elif phase == "outer":
        out = grad_out
    else:
        out = np.where(rr <= R, grad_in, grad_out)
    return float(out) if np.isscalar(r) or out.ndim == 0 else out


def unit_sphere_area(dim: int) -> float:
    """Surface area of the unit sphere in R^dim."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def torsional_rigidity_concentric(geom: BallGeometry, medium: Medium) -> float:
    """Torsional rigidity of the concentric configuration, in closed form.

    E = |S^(N-1)| * int_0^1 u(r) r^(N-1) dr, with the piecewise-polynomial
    integrand integrated exactly.
    """
    n, R = geom.dim, geom.radius
    sm, sp = medium.sigma_minus, medium.sigma_plus
    alpha = (1.0 - R * R) / (2.0 * n * sp)
    inner = alpha * R**n / n + R ** (n + 2) / (sm * n * n * (n + 2))
    outer = ((1.0 - R**n) / n - (1.0 - R ** (n + 2)) / (n + 2)) / (2.0 * n * sp)
    return unit_sphere_area(n) * (inner + outer)


def harmonic_data(dim: int, k: int) -> Mode:
    """Eigenvalue, multiplicity and radial exponents of harmonic degree k >= 1.

    Multiplicity uses the standard dimension count
    C(N+k-1, k) - C(N+k-3, k-2) of degree-k spherical harmonics.
    """
    if not (isinstance(dim, (int, np.integer)) and dim >= 2):
        raise ValueError(f"dim must be an integer >= 2, got {dim}")
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise ValueError(
            f"harmonic degree must be an integer >= 1, got {k} "
            "(k = 0 is excluded by first-order volume preservation)"
        )
    dim, k = int(dim), int(k)
    lam = float(k * (k + dim - 2))
    mult = math.comb(dim + k - 1, k)
    if k >= 2:
        mult -= math.comb(dim + k - 3, k - 2)
    return Mode(k=k, lam=lam, multiplicity=mult, eta=float(k), xi=float(2 - dim - k))


def _scaled_mode_fraction(geom, medium, ks):
    """Ratio num/den of the mode-coefficient formula, rescaled by R^(k+N-2).

    With s = R^(2k+N-2) in (0, 1):

        num = (sm - sp) * (k s + (k + N - 2))
        den = (sm - sp) * k s - ((k + N - 2) sp + k sm)

    den is strictly negative for all admissible parameters; a relative guard
    raises if cancellation ever drives it to zero.
    """
    n, R = geom.dim, geom.radius
    sm, sp = medium.sigma_minus, medium.sigma_plus
    ks = np.asarray(ks, dtype=float)
    s = R ** (2.0 * ks + n - 2.0)
    diff = sm - sp
    num = diff * (ks * s + (ks + n - 2.0))
    t1 = diff * ks * s
    t2 = (ks + n - 2.0) * sp + ks * sm
    den = t1 - t2
    guard = _DENOMINATOR_GUARD_RTOL * (np.abs(t1) + np.abs(t2))
    if np.any(np.abs(den) <= guard):
        raise DegenerateDenominatorError(
            "mode-coefficient denominator vanished to working precision"
        )
    return num, den, s


def _check_mode_order(ks):
    ks = np.asarray(ks, dtype=float)
    if np.any(ks < 1.0):
        raise ValueError("mode order k must be >= 1")
    return ks


def b_coefficient(geom: BallGeometry, medium: Medium, k) -> float:
    """Coefficient of r^k in the inner first variation of the stress function.

    Real k >= 1 is accepted so the quadratic forms can be scanned densely;
    only integer k has geometric meaning.  Grows like R^(1-k) for large k.
    """
    ks = _check_mode_order(k)
    num, den, _ = _scaled_mode_fraction(geom, medium, ks)
    n, R = geom.dim, geom.radius
    out = R ** (1.0 - ks) / (n * medium.sigma_minus) * (num / den)
    return float(out) if np.isscalar(k) or out.ndim == 0 else out


def solve_mode_coefficients(geom: BallGeometry, medium: Medium, k: int) -> ModeCoefficients:
    """Solve the 3x3 interface/boundary system for the mode-k coefficients (b, c, d).

    Conditions: value jump across the interface driven by the flux jump of
    the base stress function, flux continuity, and c + d = 0 on the outer
    sphere.  Kept as an honest dense solve so it can cross-check the closed
    form ``b_coefficient``.
    """
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise ValueError(f"mode order must be an integer >= 1, got {k}")
    n, R = geom.dim, geom.radius
    sm, sp = medium.sigma_minus, medium.sigma_plus
    xi = 2 - n - k
    mat = np.array(
        [
            [-(R**k), R**xi, R**k],
            [sm * k * R ** (k - 1), -sp * xi * R ** (xi - 1), -sp * k * R ** (k - 1)],
            [0.0, 1.0, 1.0],
        ]
    )
    rhs = np.array([-R / (n * sm) + R / (n * sp), 0.0, 0.0])
    # Row equilibration keeps the solve well conditioned despite R^xi growth.
    scale = np.max(np.abs(mat), axis=1)
    if np.any(scale == 0.0) or not np.all(np.isfinite(mat)):
        raise DegenerateDenominatorError("mode system is numerically singular")
    sol = np.linalg.solve(mat / scale[:, None], rhs / scale)
    if not np.all(np.isfinite(sol)):
        raise DegenerateDenominatorError("mode system solve produced non-finite values")
    return ModeCoefficients(b=float(sol[0]), c=float(sol[1]), d=float(sol[2]))


def q_volume_values(geom: BallGeometry, medium: Medium, ks, form: str = "sigma"):
    """Vectorized second-order coefficient Q(k) under the volume constraint.

    ``form`` selects between the two algebraically equivalent evaluations:
    "sigma" works with (sigma_minus, sigma_plus) directly, "rho" with the
    ratio rho = sigma_minus/sigma_plus.  Both are kept as a transcription
    cross-check; they agree to roundoff.
    """
    ks = _check_mode_order(ks)
    n, R = geom.dim, geom.radius
    sm, sp = medium.sigma_minus, medium.sigma_plus
    if form == "sigma":
        num, den, _ = _scaled_mode_fraction(geom, medium, ks)
        return (R / n**2) * ((sp - sm) / (sp * sm)) * (1.0 - ks * num / den)
    if form == "rho":
        rho = medium.rho
        s = R ** (2.0 * ks + n - 2.0)
        num = (rho - 1.0) * (ks * s + (ks + n - 2.0))
        t1 = (rho - 1.0) * ks * s
        t2 = (ks + n - 2.0) + ks * rho
        den = t1 - t2
        guard = _DENOMINATOR_GUARD_RTOL * (np.abs(t1) + np.abs(t2))
        if np.any(np.abs(den) <= guard):
            raise DegenerateDenominatorError(
                "mode-coefficient denominator vanished to working precision"
            )
        return (R / n**2) * ((1.0 - rho) / sm) * (1.0 - ks * num / den)
    raise ValueError(f"form must be 'sigma' or 'rho', got {form!r}")


def q_volume(geom: BallGeometry, medium: Medium, k, form: str = "sigma") -> QuadraticFormValue:
    """Second-order rigidity coefficient along a volume-preserving mode-k perturbation."""
    value = q_volume_values(geom, medium, k, form=form)
    return QuadraticFormValue(Constraint.VOLUME, float(k), float(value))


def q_perimeter_values(geom: BallGeometry, medium: Medium, ks):
    """Vectorized second-order coefficient Qt(k) under the perimeter constraint.

    Qt differs from Q by the curvature payload of the surface-area constraint:
    the mode-independent term 1 is replaced by 3/2 - k(k+N-2)/(2(N-1)).
    """
    ks = _check_mode_order(ks)
    n, R = geom.dim, geom.radius
    sm = medium.sigma_minus
    rho = medium.rho
    s = R ** (2.0 * ks + n - 2.0)
    num = (rho - 1.0) * (ks * s + (ks + n - 2.0))
    t1 = (rho - 1.0) * ks * s
    t2 = (ks + n - 2.0) + ks * rho
    den = t1 - t2
    guard = _DENOMINATOR_GUARD_RTOL * (np.abs(t1) + np.abs(t2))
    if np.any(np.abs(den) <= guard):
        raise DegenerateDenominatorError(
            "mode-coefficient denominator vanished to working precision"
        )
    lam = ks * (ks + n - 2.0)
    bracket = 1.5 - lam / (2.0 * (n - 1.0)) - ks * num / den
    return (R / n**2) * ((1.0 - rho) / sm) * bracket


def q_perimeter(geom: BallGeometry, medium: Medium, k) -> QuadraticFormValue:
    """Second-order rigidity coefficient along a surface-area-preserving mode-k perturbation."""
    value = q_perimeter_values(geom, medium, k)
    return QuadraticFormValue(Constraint.PERIMETER, float(k), float(value))


def j_function(x, dim: int, radius: float, rho: float):
    """Monotone helper behind the decay of Q(k).

    With M = N - 2 and s = R^(2x+M):

        j(x) = (x^2 s + x^2 + M x) / ((1 - rho) x s + (1 + rho) x + M)

    j is increasing on [1, inf) and Q(k) factors through it as
    Q(k) = (R/N^2) ((1-rho)/sigma_minus) (1 - (1-rho) j(k)).
    """
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 1.0):
        raise ValueError("j_function is defined for x >= 1")
    if not (isinstance(dim, (int, np.integer)) and dim >= 2):
        raise ValueError(f"dim must be an integer >= 2, got {dim}")
    if not (0.0 < radius < 1.0):
        raise ValueError(f"radius must lie in (0, 1), got {radius}")
    if not (rho > 0.0):
        raise ValueError(f"rho must be positive, got {rho}")
    m = dim - 2.0
    s = radius ** (2.0 * xs + m)
    num = xs * xs * s + xs * xs + m * xs
    den = (1.0 - rho) * xs * s + (1.0 + rho) * xs + m
    out = num / den
    return float(out) if np.isscalar(x) or out.ndim == 0 else out


def volume_sap_coefficient(geom: BallGeometry, k: int) -> float:
    """Second-order volume drift of a surface-area-preserving mode-k map.

    Equals (1/2) (1/R - k(k+N-2)/((N-1) R)); zero exactly at k = 1
    (translations) and strictly decreasing in k beyond.
    """
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise ValueError(f"mode order must be an integer >= 1, got {k}")
    n, R = geom.dim, geom.radius
    lam = k * (k + n - 2.0)
    return 0.5 * (1.0 / R - lam / ((n - 1.0) * R))


def _first_mode(predicate, start: int = 2) -> Optional[int]:
    """Smallest integer k >= start whose predicate holds, or None past the scan cap.

    The cap only binds for near-degenerate conductivity ratios, where the
    first sign change sits at k of order 1/|1 - rho|.
    """
    block = 256
    while start <= CRITICAL_MODE_CAP:
        ks = np.arange(start, min(start + block, CRITICAL_MODE_CAP + 1))
        hits = predicate(ks)
        if np.any(hits):
            return int(ks[np.argmax(hits)])
        start = int(ks[-1]) + 1
    return None


def classify(
    geom: BallGeometry, medium: Medium, constraint: Union[str, Constraint]
) -> Classification:
    """Classify the concentric interface under the given constraint.

    Volume constraint: a local maximizer when sigma_minus > sigma_plus,
    otherwise a saddle whose ``critical_mode`` is the first k with Q(k) < 0.
    Perimeter constraint: always a saddle (critical_mode = first k >= 2 whose
    Qt flips the sign of Qt(1)).  Equal conductivities are degenerate: the
    rigidity does not depend on the interface at all.

    The verdict follows from sign laws and is always set; ``critical_mode``
    is None if the linear scan cap is exhausted first (only possible for
    conductivities within about 1e-6 of each other).
    """
    constraint = _as_constraint(constraint)
    if medium.is_degenerate:
        return Classification(Verdict.DEGENERATE)
    if constraint is Constraint.VOLUME:
        if medium.sigma_minus > medium.sigma_plus:
            return Classification(Verdict.LOCAL_MAXIMIZER)
        # Q(1) > 0 and Q decreasing: the scan terminates.
        mode = _first_mode(lambda ks: q_volume_values(geom, medium, ks) < 0.0)
        return Classification(Verdict.SADDLE, critical_mode=mode)
    sign1 = np.sign(q_perimeter_values(geom, medium, 1.0))
    mode = _first_mode(
        lambda ks: np.sign(q_perimeter_values(geom, medium, ks)) != sign1
    )
    return Classification(Verdict.SADDLE, critical_mode=mode)
