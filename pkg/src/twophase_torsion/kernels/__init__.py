"""Hot numerical kernels with a numba fast path and a pure-numpy fallback.

Backend selection, in order of precedence:

1. explicit ``backend=`` argument,
2. the ``TORSION_KERNELS`` environment variable ("numba" or "numpy"),
3. numba if importable, else numpy.

Both backends return identical COO triplets up to floating-point summation
order; ``benchmarks/bench_kernels.py`` compares their throughput.
"""

from __future__ import annotations

import os
import warnings

from . import numpy_backend

_VALID = ("numba", "numpy")
_cached_numba = None


def _load_numba_backend():
    global _cached_numba
    if _cached_numba is None:
        from . import numba_backend

        _cached_numba = numba_backend
    return _cached_numba


def default_backend_name() -> str:
    env = os.environ.get("TORSION_KERNELS", "").strip().lower()
    if env:
        if env not in _VALID:
            raise ValueError(
                f"TORSION_KERNELS must be one of {_VALID}, got {env!r}"
            )
        return env
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


def get_backend(name: str | None = None):
    """Resolve a kernel backend module by name (or the configured default)."""
    name = name or default_backend_name()
    if name == "numpy":
        return numpy_backend
    if name == "numba":
        try:
            return _load_numba_backend()
        except ImportError:
            if os.environ.get("TORSION_KERNELS", "").strip().lower() == "numba":
                raise
            warnings.warn(
                "numba unavailable, falling back to numpy kernels", RuntimeWarning
            )
            return numpy_backend
    raise ValueError(f"unknown kernel backend {name!r}; expected one of {_VALID}")


def assemble_p1(nodes, triangles, sigma, backend: str | None = None):
    """Piecewise-linear stiffness triplets and unit load vector for a triangle mesh.

    Returns ``(rows, cols, vals, load)`` where the triplets describe
    sum_T sigma_T * area_T * grad(phi_i) . grad(phi_j) and ``load`` is the
    elementwise-exact integral of each hat function.
    """
    return get_backend(backend).assemble_p1(nodes, triangles, sigma)
