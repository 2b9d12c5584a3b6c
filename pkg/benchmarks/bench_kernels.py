"""Benchmark the assembly kernel: numba JIT path vs pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py [--h 0.005] [--reps 5]

The same comparison path is selected at import time by TORSION_KERNELS
(numba|numpy); this script times both explicitly and checks they assemble
the same matrix.
"""

import argparse
import time

import numpy as np
import scipy.sparse as sp

from twophase_torsion import BallGeometry, Medium, build_family, build_mesh
from twophase_torsion.fem2d.solve import _sigma_per_triangle
from twophase_torsion.kernels import assemble_p1


def _time_backend(backend, mesh, sigma, reps):
    # warmup (JIT compilation for numba, cache touch for numpy)
    assemble_p1(mesh.nodes, mesh.triangles, sigma, backend=backend)
    best = np.inf
    for _ in range(reps):
        start = time.perf_counter()
        out = assemble_p1(mesh.nodes, mesh.triangles, sigma, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--h", type=float, default=0.005, help="target mesh size")
    parser.add_argument("--reps", type=int, default=5, help="timing repetitions")
    args = parser.parse_args()

    geom, med = BallGeometry(2, 0.5), Medium(2.0, 1.0)
    family = build_family(geom, med, 2, "volume")
    t_build = time.perf_counter()
    mesh = build_mesh(family, 0.02, args.h)
    t_build = time.perf_counter() - t_build
    sigma = _sigma_per_triangle(mesh, med)
    print(f"mesh: {mesh.node_count} nodes, {mesh.triangle_count} triangles "
          f"(h={args.h}, built in {t_build:.2f} s)")

    results = {}
    for backend in ("numpy", "numba"):
        best, out = _time_backend(backend, mesh, sigma, args.reps)
        results[backend] = (best, out)
        rate = mesh.triangle_count / best / 1e6
        print(f"{backend:>6}: best of {args.reps}  {best * 1e3:8.2f} ms   "
              f"({rate:.1f} M triangles/s)")

    speedup = results["numpy"][0] / results["numba"][0]
    print(f"speedup (numba over numpy): {speedup:.2f}x")

    n = mesh.node_count
    mats = {
        name: sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        for name, (_, (rows, cols, vals, _)) in results.items()
    }
    gap = abs(mats["numpy"] - mats["numba"]).max()
    scale = abs(mats["numpy"]).max()
    print(f"max matrix entry difference: {gap:.2e} (scale {scale:.2e})")
    if gap > 1e-12 * scale:
        raise SystemExit("backends disagree beyond roundoff")
    print("backends agree to roundoff")


if __name__ == "__main__":
    main()
