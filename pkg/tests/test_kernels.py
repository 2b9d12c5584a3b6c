"""Kernel backends: numba and numpy paths agree; selection respects the flag."""

import numpy as np
import pytest
import scipy.sparse as sp

from twophase_torsion import BallGeometry, Medium, build_family, build_mesh
from twophase_torsion import kernels
from twophase_torsion.fem2d.solve import _sigma_per_triangle


@pytest.fixture(scope="module")
def mesh_and_sigma():
    geom, med = BallGeometry(2, 0.5), Medium(2.0, 1.0)
    mesh = build_mesh(build_family(geom, med, 2, "volume"), 0.02, 0.04)
    return mesh, _sigma_per_triangle(mesh, med)


def _to_csr(rows, cols, vals, n):
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


class TestBackendAgreement:
    def test_triplets_and_load_match(self, mesh_and_sigma):
        mesh, sigma = mesh_and_sigma
        out_np = kernels.assemble_p1(mesh.nodes, mesh.triangles, sigma, backend="numpy")
        out_nb = kernels.assemble_p1(mesh.nodes, mesh.triangles, sigma, backend="numba")
        np.testing.assert_array_equal(out_np[0], out_nb[0])
        np.testing.assert_array_equal(out_np[1], out_nb[1])
        np.testing.assert_allclose(out_np[2], out_nb[2], rtol=1e-13, atol=1e-16)
        np.testing.assert_allclose(out_np[3], out_nb[3], rtol=1e-13)

    def test_assembled_matrices_match(self, mesh_and_sigma):
        mesh, sigma = mesh_and_sigma
        n = mesh.node_count
        mats = {}
        for backend in ("numpy", "numba"):
            rows, cols, vals, _ = kernels.assemble_p1(
                mesh.nodes, mesh.triangles, sigma, backend=backend
            )
            mats[backend] = _to_csr(rows, cols, vals, n)
        gap = (mats["numpy"] - mats["numba"]).toarray()
        scale = np.abs(mats["numpy"].toarray()).max()
        assert np.abs(gap).max() <= 1e-13 * scale

    def test_stiffness_rows_sum_to_zero(self, mesh_and_sigma):
        # constants lie in the kernel of the stiffness operator
        mesh, sigma = mesh_and_sigma
        rows, cols, vals, load = kernels.assemble_p1(mesh.nodes, mesh.triangles, sigma)
        mat = _to_csr(rows, cols, vals, mesh.node_count)
        np.testing.assert_allclose(mat @ np.ones(mesh.node_count), 0.0, atol=1e-12)
        assert load.sum() == pytest.approx(np.pi, rel=1e-3)


class TestSelection:
    def test_env_flag_selects_numpy(self, monkeypatch):
        monkeypatch.setenv("TORSION_KERNELS", "numpy")
        assert kernels.default_backend_name() == "numpy"
        assert kernels.get_backend().__name__.endswith("numpy_backend")

    def test_env_flag_selects_numba(self, monkeypatch):
        monkeypatch.setenv("TORSION_KERNELS", "numba")
        assert kernels.default_backend_name() == "numba"
        assert kernels.get_backend().__name__.endswith("numba_backend")

    def test_env_flag_validated(self, monkeypatch):
        monkeypatch.setenv("TORSION_KERNELS", "fortran")
        with pytest.raises(ValueError):
            kernels.default_backend_name()

    def test_unknown_backend_argument(self):
        with pytest.raises(ValueError):
            kernels.get_backend("cuda")
