"""Exception hierarchy.

``ValueError`` is reserved for bad arguments / configuration (CLI exit 1);
``NumericalError`` subclasses signal failures of a numerical stage
(CLI exit 2).
"""


class NumericalError(RuntimeError):
    """A numerical stage failed (solver, mesh, fit, degenerate formula)."""


class DegenerateDenominatorError(NumericalError):
    """Closed-form denominator vanished to working precision.

    The denominator of the mode-coefficient formula is provably sign-definite
    for admissible parameters, so this guard should never fire; it exists to
    fail loudly instead of returning garbage.
    """


class SolverError(NumericalError):
    """A linear solve did not produce an acceptable residual."""


class MeshError(NumericalError):
    """Mesh generation produced degenerate or low-quality triangles."""


class FitError(NumericalError):
    """Least-squares expansion fit rejected (residual above threshold)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
