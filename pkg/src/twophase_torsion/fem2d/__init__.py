"""Planar finite-element oracle: perturbation families, meshing, solve, fits."""

from .estimate import FemEstimate, FitResult, default_t_samples, estimate_q
from .family import PerturbationFamily, build_family
from .mesh import Mesh, build_mesh, min_triangle_angle, triangle_areas
from .solve import EnergyPair, FemSolution, assemble_solve, assemble_system, energy

__all__ = [
    "PerturbationFamily",
    "build_family",
    "Mesh",
    "build_mesh",
    "triangle_areas",
    "min_triangle_angle",
    "FemSolution",
    "EnergyPair",
    "assemble_system",
    "assemble_solve",
    "energy",
    "FitResult",
    "FemEstimate",
    "default_t_samples",
    "estimate_q",
]
