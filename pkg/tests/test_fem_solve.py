"""Galerkin solve on interface-fitted meshes against the closed forms."""

import math

import numpy as np
import pytest

from twophase_torsion import (
    BallGeometry,
    Medium,
    build_family,
    build_mesh,
    stress_function,
    torsional_rigidity_concentric,
)
from twophase_torsion.fem2d import assemble_solve, energy

GEOM = BallGeometry(2, 0.5)


def _solve_unperturbed(med, h, k=2):
    fam = build_family(GEOM, med, k, "volume")
    mesh = build_mesh(fam, 0.0, h)
    sol = assemble_solve(mesh, med)
    return mesh, sol


def _nodal_error(mesh, sol, med):
    r = np.clip(np.hypot(*mesh.nodes.T), 0.0, 1.0)
    exact = stress_function(GEOM, med, r)
    return np.max(np.abs(sol.values - exact)) / np.max(exact)


class TestAccuracy:
    @pytest.mark.parametrize("med", [Medium(1.0, 1.0), Medium(2.0, 1.0), Medium(1.0, 3.0)])
    def test_nodal_second_order(self, med):
        errs = [_nodal_error(*_solve_unperturbed(med, h)[:2], med) for h in (0.05, 0.025)]
        assert errs[0] <= 2e-3
        assert 3.0 <= errs[0] / errs[1] <= 6.0

    def test_nonnegative_solution(self):
        for med in (Medium(1.0, 1.0), Medium(0.5, 1.0)):
            _, sol = _solve_unperturbed(med, 0.04)
            assert np.all(sol.values >= 0.0)

    def test_residual_is_tiny(self):
        _, sol = _solve_unperturbed(Medium(2.0, 1.0), 0.04)
        assert sol.residual <= 1e-10


class TestEnergy:
    def test_discrete_energies_coincide(self):
        # Galerkin identity with the solution as test function: int u_h equals
        # the Dirichlet form exactly, not just at O(h^2).
        for med in (Medium(1.0, 1.0), Medium(2.0, 1.0)):
            mesh, sol = _solve_unperturbed(med, 0.04)
            pair = energy(mesh, sol)
            assert pair.dirichlet == pytest.approx(pair.integral_u, rel=1e-12)

    def test_unperturbed_energy_second_order(self):
        med = Medium(2.0, 1.0)
        closed = torsional_rigidity_concentric(GEOM, med)
        gaps = []
        for h in (0.05, 0.025):
            mesh, sol = _solve_unperturbed(med, h)
            gaps.append(abs(energy(mesh, sol).integral_u - closed) / closed)
        assert gaps[0] <= 3e-3
        assert 3.0 <= gaps[0] / gaps[1] <= 6.0

    def test_even_in_t(self):
        med = Medium(2.0, 1.0)
        fam = build_family(GEOM, med, 2, "volume")
        vals = []
        for t in (0.03, -0.03):
            mesh = build_mesh(fam, t, 0.04)
            vals.append(energy(mesh, assemble_solve(mesh, med)).integral_u)
        assert vals[0] == pytest.approx(vals[1], rel=1e-12)

    @pytest.mark.parametrize("k", [2, 3])
    def test_invariant_under_mode_rotation(self, k):
        med = Medium(2.0, 1.0)
        fam = build_family(GEOM, med, k, "volume")
        mesh = build_mesh(fam, 0.025, 0.04)
        base = energy(mesh, assemble_solve(mesh, med)).integral_u
        phi = 2.0 * math.pi / k
        rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
        rotated = type(mesh)(
            nodes=mesh.nodes @ rot.T,
            triangles=mesh.triangles,
            region=mesh.region,
            boundary_nodes=mesh.boundary_nodes,
            interface_nodes=mesh.interface_nodes,
            target_h=mesh.target_h,
            ring_sizes=mesh.ring_sizes,
            interface_ring=mesh.interface_ring,
        )
        val = energy(rotated, assemble_solve(rotated, med)).integral_u
        assert val == pytest.approx(base, rel=1e-12)
