"""Recover the second-order rigidity coefficient from finite-element energy curves.

For a mode-k family the rigidity expands as E(t) = E0 + c2 t^2 + O(t^4)
(the linear term vanishes at a critical shape).  The estimator

1. solves the transmission problem over a symmetric window of t values on a
   mesh of size h and on each refinement h/2, h/4, ...,
2. fits E_h(t) = e0 + c1 t + c2 t^2 + c4 t^4 per level by least squares (the
   quartic term absorbs the o(t^2) remainder, the linear term is retained as
   a criticality diagnostic),
3. Richardson-extrapolates the per-level c2 assuming O(h^2) convergence.

The fitted c2 is compared against the closed-form coefficient of the
requested constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..analytic import (
    BallGeometry,
    Constraint,
    Medium,
    _as_constraint,
    q_perimeter_values,
    q_volume_values,
)
from ..errors import FitError
from .family import PerturbationFamily, build_family
from .mesh import build_mesh
from .solve import assemble_solve, energy

__all__ = ["FitResult", "FemEstimate", "default_t_samples", "fit_energy_curve", "estimate_q"]

DEFAULT_T_BASE = (0.005, 0.01, 0.02, 0.03)
_DEFAULT_FIT_RTOL = 1e-5


@dataclass(frozen=True)
class FitResult:
    """Least-squares expansion fit of one energy curve."""

    e0: float
    c1: float
    c2: float
    c4: float
    residual_rms: float
    se_c1: float
    se_c2: float

    @property
    def first_order_ok(self) -> bool:
        """Criticality check: fitted linear term statistically zero."""
        return abs(self.c1) <= 3.0 * self.se_c1


@dataclass(frozen=True)
class FemEstimate:
    """Fitted second-order coefficient with its analytic reference."""

    constraint: Constraint
    k: int
    t_samples: np.ndarray
    mesh_sizes: tuple
    node_counts: tuple
    energies: np.ndarray            # (levels, samples), int-u estimator
    energies_dirichlet: np.ndarray  # (levels, samples)
    fits: tuple
    q_estimate: float
    q_analytic: float

    @property
    def rel_error(self) -> float:
        if self.q_analytic == 0.0:
            return math.inf if self.q_estimate != 0.0 else 0.0
        return abs(self.q_estimate - self.q_analytic) / abs(self.q_analytic)

    def richardson_energies(self) -> np.ndarray:
        """Per-sample O(h^2) extrapolation of the energies across the last two levels."""
        if self.energies.shape[0] < 2:
            return self.energies[-1]
        return (4.0 * self.energies[-1] - self.energies[-2]) / 3.0

    def to_record(self) -> dict:
        return {
            "constraint": self.constraint.value,
            "k": self.k,
            "mesh_levels": list(self.mesh_sizes),
            "node_counts": list(self.node_counts),
            "t_samples": self.t_samples.tolist(),
            "energies": self.energies.tolist(),
            "energies_dirichlet": self.energies_dirichlet.tolist(),
            "fit": [
                {
                    "e0": f.e0,
                    "c1": f.c1,
                    "c2": f.c2,
                    "c4": f.c4,
                    "residual_rms": f.residual_rms,
                    "se_c1": f.se_c1,
                    "se_c2": f.se_c2,
                }
                for f in self.fits
            ],
            "q_estimate": self.q_estimate,
            "q_analytic": self.q_analytic,
            "rel_error": self.rel_error,
        }


def default_t_samples(
    family: PerturbationFamily,
    t_max: Optional[float] = None,
    n_t: Optional[int] = None,
) -> np.ndarray:
    """Symmetric t window: 0 and +-(base points), scaled down if admissibility binds.

    With ``t_max``/``n_t`` given, uses n_t uniform magnitudes up to t_max
    instead of the default base points.
    """
    if t_max is not None or n_t is not None:
        t_max = 0.03 if t_max is None else float(t_max)
        n_t = len(DEFAULT_T_BASE) if n_t is None else int(n_t)
        if n_t < 2:
            raise ValueError("need at least 2 magnitudes per side")
        base = t_max * np.arange(1, n_t + 1) / n_t
    else:
        base = np.asarray(DEFAULT_T_BASE)
    limit = 0.8 * family.t_admissible
    if base[-1] > limit:
        base = base * (limit / base[-1])
    return np.concatenate([-base[::-1], [0.0], base])


def _design_matrix(ts: np.ndarray) -> np.ndarray:
    return np.stack([np.ones_like(ts), ts, ts**2, ts**4], axis=1)


def fit_energy_curve(ts: np.ndarray, energies: np.ndarray, fit_rtol: float) -> FitResult:
    """Fit E(t) = e0 + c1 t + c2 t^2 + c4 t^4 and reject poor fits."""
    x = _design_matrix(ts)
    coef, *_ = np.linalg.lstsq(x, energies, rcond=None)
    resid = energies - x @ coef
    dof = len(ts) - x.shape[1]
    if dof <= 0:
        raise ValueError("need more samples than fit coefficients")
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(x.T @ x)
    rms = math.sqrt(float(resid @ resid) / len(ts))
    scale = max(abs(float(coef[0])), 1e-300)
    if rms > fit_rtol * scale:
        raise FitError(
            f"expansion fit residual {rms:.3e} above {fit_rtol:.1e} * |E0| = "
            f"{fit_rtol * scale:.3e}",
            diagnostics={
                "t_samples": ts.tolist(),
                "energies": energies.tolist(),
                "coefficients": coef.tolist(),
                "residual_rms": rms,
            },
        )
    return FitResult(
        e0=float(coef[0]),
        c1=float(coef[1]),
        c2=float(coef[2]),
        c4=float(coef[3]),
        residual_rms=rms,
        se_c1=math.sqrt(max(cov[1, 1], 0.0)),
        se_c2=math.sqrt(max(cov[2, 2], 0.0)),
    )


def _richardson_c2(c2s: Sequence[float], order: float = 2.0) -> float:
    """Richardson tableau over successive halvings with known error order."""
    vals = [float(v) for v in c2s]
    p = order
    level = 1
    while len(vals) > 1:
        factor = 2.0 ** (p * level)
        vals = [
            (factor * vals[i + 1] - vals[i]) / (factor - 1.0)
            for i in range(len(vals) - 1)
        ]
        level += 1
    return vals[0]


def _validate_t_list(ts: np.ndarray, family: PerturbationFamily) -> np.ndarray:
    ts = np.sort(np.asarray(ts, dtype=float))
    if len(ts) < 5:
        raise ValueError("need at least 5 t samples for the expansion fit")
    if np.any(np.abs(ts) >= family.t_admissible):
        raise ValueError("t sample outside the admissible window")
    if np.max(np.abs(ts + ts[::-1])) > 1e-12 * max(np.max(np.abs(ts)), 1e-300):
        raise ValueError("t samples must be symmetric about 0")
    return ts


def estimate_q(
    geom: BallGeometry,
    medium: Medium,
    k: int,
    constraint: Union[str, Constraint],
    h: float,
    t_list: Optional[Sequence[float]] = None,
    levels: int = 2,
    fit_rtol: float = _DEFAULT_FIT_RTOL,
    backend: Optional[str] = None,
) -> FemEstimate:
    """Run the fit/refine/extrapolate pipeline for one mode and constraint."""
    constraint = _as_constraint(constraint)
    if levels < 1:
        raise ValueError("need at least one mesh level")
    family = build_family(geom, medium, k, constraint)
    ts = (
        default_t_samples(family)
        if t_list is None
        else _validate_t_list(np.asarray(t_list), family)
    )

    mesh_sizes = tuple(h / 2**lev for lev in range(levels))
    all_e = np.empty((levels, len(ts)))
    all_dir = np.empty((levels, len(ts)))
    node_counts = []
    for lev, h_lev in enumerate(mesh_sizes):
        nodes_this_level = 0
        for it, t in enumerate(ts):
            mesh = build_mesh(family, float(t), h_lev)
            sol = assemble_solve(mesh, medium, backend=backend)
            pair = energy(mesh, sol)
            all_e[lev, it] = pair.integral_u
            all_dir[lev, it] = pair.dirichlet
            nodes_this_level = max(nodes_this_level, mesh.node_count)
        node_counts.append(nodes_this_level)

    fits = tuple(fit_energy_curve(ts, all_e[lev], fit_rtol) for lev in range(levels))
    q_est = _richardson_c2([f.c2 for f in fits]) if levels > 1 else fits[0].c2

    if constraint is Constraint.VOLUME:
        q_ana = float(q_volume_values(geom, medium, float(k)))
    else:
        q_ana = float(q_perimeter_values(geom, medium, float(k)))

    return FemEstimate(
        constraint=constraint,
        k=int(k),
        t_samples=ts,
        mesh_sizes=mesh_sizes,
        node_counts=tuple(node_counts),
        energies=all_e,
        energies_dirichlet=all_dir,
        fits=fits,
        q_estimate=float(q_est),
        q_analytic=q_ana,
    )
