"""Numba-compiled assembly kernel (same contract as the numpy backend)."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _assemble_p1_impl(nodes, tris, sigma):
    nt = tris.shape[0]
    rows = np.empty(9 * nt, dtype=np.int32)
    cols = np.empty(9 * nt, dtype=np.int32)
    vals = np.empty(9 * nt, dtype=np.float64)
    load = np.zeros(nodes.shape[0], dtype=np.float64)
    bx = np.empty(3, dtype=np.float64)
    by = np.empty(3, dtype=np.float64)
    for e in range(nt):
        i0, i1, i2 = tris[e, 0], tris[e, 1], tris[e, 2]
        x0, y0 = nodes[i0, 0], nodes[i0, 1]
        x1, y1 = nodes[i1, 0], nodes[i1, 1]
        x2, y2 = nodes[i2, 0], nodes[i2, 1]
        det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        area = 0.5 * abs(det)
        bx[0] = y1 - y2
        bx[1] = y2 - y0
        bx[2] = y0 - y1
        by[0] = x2 - x1
        by[1] = x0 - x2
        by[2] = x1 - x0
        scale = sigma[e] * area / (det * det)
        base = 9 * e
        for a in range(3):
            ia = tris[e, a]
            load[ia] += area / 3.0
            for b in range(3):
                idx = base + 3 * a + b
                rows[idx] = ia
                cols[idx] = tris[e, b]
                vals[idx] = scale * (bx[a] * bx[b] + by[a] * by[b])
    return rows, cols, vals, load


def assemble_p1(nodes, triangles, sigma):
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    tris = np.ascontiguousarray(triangles, dtype=np.int32)
    sigma = np.ascontiguousarray(sigma, dtype=np.float64)
    return _assemble_p1_impl(nodes, tris, sigma)
