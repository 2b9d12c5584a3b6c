"""Two-phase torsion shape analysis on the unit ball.

Closed-form second-order shape expansion of the torsional rigidity around a
concentric inclusion, with two independent numerical oracles (a radial
finite-difference solver and a planar interface-fitted finite-element
pipeline) and a batch CLI.
"""

from .analytic import (
    BallGeometry,
    Classification,
    Constraint,
    Medium,
    Mode,
    ModeCoefficients,
    QuadraticFormValue,
    StressProfile,
    Verdict,
    b_coefficient,
    classify,
    harmonic_data,
    j_function,
    q_perimeter,
    q_perimeter_values,
    q_volume,
    q_volume_values,
    solve_mode_coefficients,
    stress_function,
    stress_gradient,
    torsional_rigidity_concentric,
    unit_sphere_area,
    volume_sap_coefficient,
)
from .errors import (
    DegenerateDenominatorError,
    FitError,
    MeshError,
    NumericalError,
    SolverError,
)
from .fem2d import (
    FemEstimate,
    FemSolution,
    Mesh,
    PerturbationFamily,
    assemble_solve,
    build_family,
    build_mesh,
    energy,
    estimate_q,
)
from .radial import (
    RadialGrid,
    RadialSolution,
    build_radial_grid,
    energy_from_solution,
    energy_richardson,
    solve_radial,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BallGeometry",
    "Medium",
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
    "RadialGrid",
    "RadialSolution",
    "build_radial_grid",
    "solve_radial",
    "energy_from_solution",
    "energy_richardson",
    "PerturbationFamily",
    "build_family",
    "Mesh",
    "build_mesh",
    "FemSolution",
    "assemble_solve",
    "energy",
    "FemEstimate",
    "estimate_q",
    "NumericalError",
    "DegenerateDenominatorError",
    "SolverError",
    "MeshError",
    "FitError",
]
