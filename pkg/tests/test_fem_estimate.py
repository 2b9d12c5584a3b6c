"""Expansion-fit pipeline on coarse meshes (the acceptance suite runs it fine)."""

import numpy as np
import pytest

from twophase_torsion import BallGeometry, Medium, estimate_q
from twophase_torsion.errors import FitError
from twophase_torsion.fem2d import build_family, default_t_samples

GEOM = BallGeometry(2, 0.5)


class TestWindow:
    def test_default_window(self):
        fam = build_family(GEOM, Medium(2.0, 1.0), 1, "volume")
        ts = default_t_samples(fam)
        np.testing.assert_allclose(
            ts, [-0.03, -0.02, -0.01, -0.005, 0.0, 0.005, 0.01, 0.02, 0.03]
        )

    def test_window_scales_when_admissibility_binds(self):
        geom = BallGeometry(2, 0.99)
        fam = build_family(geom, Medium(2.0, 1.0), 1, "volume")
        ts = default_t_samples(fam)
        assert ts.max() == pytest.approx(0.8 * fam.t_admissible, rel=1e-12)
        assert ts.max() < 0.03
        ratios = ts[ts > 0.0] / ts.max()
        np.testing.assert_allclose(ratios, np.array([0.005, 0.01, 0.02, 0.03]) / 0.03)

    def test_uniform_window_from_t_max(self):
        fam = build_family(GEOM, Medium(2.0, 1.0), 2, "volume")
        ts = default_t_samples(fam, t_max=0.02, n_t=4)
        np.testing.assert_allclose(ts[ts > 0.0], [0.005, 0.01, 0.015, 0.02])

    def test_rejects_bad_windows(self):
        med = Medium(2.0, 1.0)
        with pytest.raises(ValueError):
            estimate_q(GEOM, med, 1, "volume", h=0.05, t_list=[-0.01, 0.0, 0.01, 0.02])
        with pytest.raises(ValueError):
            estimate_q(GEOM, med, 1, "volume", h=0.05, t_list=[-0.01, 0.0, 0.01])
        with pytest.raises(ValueError):
            estimate_q(GEOM, med, 1, "volume", h=0.05, t_list=[-1.0, -0.5, 0.0, 0.5, 1.0])


class TestEstimate:
    def test_volume_mode_one(self):
        est = estimate_q(GEOM, Medium(2.0, 1.0), 1, "volume", h=0.04)
        assert est.rel_error <= 0.02
        assert est.q_analytic == pytest.approx(-1.0 / 11.0, rel=1e-12)
        for fit in est.fits:
            assert fit.first_order_ok
            assert fit.residual_rms <= 1e-8 * abs(fit.e0)
        # window symmetry: energies even in t
        np.testing.assert_allclose(
            est.energies[:, ::-1], est.energies, rtol=1e-11
        )

    def test_perimeter_mode_two(self):
        est = estimate_q(GEOM, Medium(1.0, 2.0), 2, "perimeter", h=0.05)
        assert est.rel_error <= 0.02
        assert np.sign(est.q_estimate) == np.sign(est.q_analytic)

    def test_refinement_gap_shrinks_like_h_squared(self):
        est = estimate_q(GEOM, Medium(2.0, 1.0), 2, "volume", h=0.08, levels=3)
        c2 = [fit.c2 for fit in est.fits]
        gap_ratio = abs(c2[1] - c2[0]) / abs(c2[2] - c2[1])
        assert gap_ratio >= 2.5

    def test_degenerate_medium_flat_curve(self):
        est = estimate_q(GEOM, Medium(1.0, 1.0), 1, "volume", h=0.04)
        assert abs(est.q_estimate) <= 1e-4 * abs(est.fits[-1].e0)
        assert est.q_analytic == 0.0

    def test_fit_threshold_rejects(self):
        with pytest.raises(FitError) as excinfo:
            estimate_q(GEOM, Medium(2.0, 1.0), 1, "volume", h=0.05, fit_rtol=1e-16)
        assert "residual" in str(excinfo.value)
        assert "coefficients" in excinfo.value.diagnostics

    def test_record_schema(self):
        est = estimate_q(GEOM, Medium(2.0, 1.0), 1, "volume", h=0.05)
        record = est.to_record()
        for key in ("mesh_levels", "t_samples", "energies", "fit", "q_estimate",
                    "q_analytic", "rel_error"):
            assert key in record
        assert len(record["fit"]) == 2
        rich = est.richardson_energies()
        assert rich.shape == est.t_samples.shape


class TestBackends:
    def test_numpy_backend_through_pipeline(self):
        numba_est = estimate_q(GEOM, Medium(2.0, 1.0), 1, "volume", h=0.05)
        numpy_est = estimate_q(GEOM, Medium(2.0, 1.0), 1, "volume", h=0.05,
                               backend="numpy")
        assert numpy_est.q_estimate == pytest.approx(numba_est.q_estimate, rel=1e-9)
