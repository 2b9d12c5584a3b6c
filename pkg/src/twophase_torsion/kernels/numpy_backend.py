"""Vectorized numpy implementation of the assembly kernel."""

from __future__ import annotations

import numpy as np


def assemble_p1(nodes, triangles, sigma):
    nodes = np.asarray(nodes, dtype=np.float64)
    tris = np.asarray(triangles, dtype=np.int32)
    sigma = np.asarray(sigma, dtype=np.float64)

    p = nodes[tris]  # (nt, 3, 2)
    x, y = p[:, :, 0], p[:, :, 1]
    det = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (
        y[:, 1] - y[:, 0]
    )
    area = 0.5 * np.abs(det)

    # Hat-function gradients: grad(phi_a) = (bx_a, by_a) / det.
    bx = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    by = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    scale = (sigma * area / (det * det))[:, None, None]
    local = scale * (
        bx[:, :, None] * bx[:, None, :] + by[:, :, None] * by[:, None, :]
    )

    rows = np.repeat(tris, 3, axis=1).reshape(-1)
    cols = np.tile(tris, (1, 3)).reshape(-1)
    vals = local.reshape(-1)

    load = np.zeros(nodes.shape[0], dtype=np.float64)
    np.add.at(load, tris.reshape(-1), np.repeat(area / 3.0, 3))
    return rows, cols, vals, load
