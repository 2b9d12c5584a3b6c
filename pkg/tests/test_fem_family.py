"""Exactness of the constrained interface families."""

import math

import numpy as np
import pytest

from twophase_torsion import BallGeometry, Medium, build_family, volume_sap_coefficient

GEOM = BallGeometry(2, 0.5)
MED = Medium(2.0, 1.0)


def _second_t_derivative(fn, dt):
    """Even second difference with one Richardson step (kills the t^4 term)."""
    d = lambda s: (fn(s) + fn(-s) - 2.0 * fn(0.0)) / (s * s)
    return (4.0 * d(dt) - d(2.0 * dt)) / 3.0


class TestVolumeFamily:
    def test_amplitude_normalization(self):
        fam = build_family(GEOM, MED, 3, "volume")
        assert fam.amplitude == pytest.approx(1.0 / math.sqrt(math.pi * 0.5), rel=1e-15)
        theta = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        speed_sq = np.mean(fam.normal_speed(theta) ** 2) * 2.0 * math.pi
        assert speed_sq == pytest.approx(1.0 / GEOM.radius, rel=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 3, 5])
    def test_area_exactly_preserved(self, k):
        fam = build_family(GEOM, MED, k, "volume")
        target = math.pi * GEOM.radius**2
        for t in (0.0, 0.01, -0.04, 0.3 * fam.t_admissible):
            assert fam.enclosed_area(t) == pytest.approx(target, rel=1e-12)

    def test_unperturbed_is_the_circle(self):
        for constraint in ("volume", "perimeter"):
            fam = build_family(GEOM, MED, 2, constraint)
            theta = np.linspace(0.0, 2.0 * math.pi, 64)
            np.testing.assert_allclose(fam.radius(theta, 0.0), GEOM.radius, rtol=1e-15)

    def test_normal_speed_is_t_derivative_of_radius(self):
        fam = build_family(GEOM, MED, 2, "volume")
        theta = np.linspace(0.0, 2.0 * math.pi, 17)
        dt = 1e-5
        fd = (fam.radius(theta, dt) - fam.radius(theta, -dt)) / (2.0 * dt)
        np.testing.assert_allclose(fd, fam.normal_speed(theta), atol=1e-9)

    def test_admissibility_window(self):
        fam = build_family(GEOM, MED, 1, "volume")
        assert fam.t_admissible == pytest.approx(
            min(1.0 - 0.5, 0.7 * 0.5) / fam.amplitude, rel=1e-15
        )
        with pytest.raises(ValueError):
            fam.radius(0.0, fam.t_admissible * 1.01)
        with pytest.raises(ValueError):
            fam.center(-fam.t_admissible)

    def test_build_validation(self):
        with pytest.raises(ValueError):
            build_family(BallGeometry(3, 0.5), MED, 1, "volume")
        with pytest.raises(ValueError):
            build_family(GEOM, MED, 0, "volume")
        with pytest.raises(ValueError):
            build_family(GEOM, "not a medium", 1, "volume")
        with pytest.raises(ValueError):
            build_family(GEOM, MED, 1, "area")


class TestPerimeterFamily:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_length_exactly_preserved(self, k):
        fam = build_family(GEOM, MED, k, "perimeter")
        target = 2.0 * math.pi * GEOM.radius
        for t in (0.005, -0.02, 0.04):
            assert fam.curve_length(t) == pytest.approx(target, abs=1e-11)

    def test_center_even_in_t(self):
        fam = build_family(GEOM, MED, 2, "perimeter")
        assert fam.center(0.03) == pytest.approx(fam.center(-0.03), rel=1e-12)
        assert fam.center(0.0) == GEOM.radius

    def test_translation_mode_keeps_area_to_fourth_order(self):
        fam = build_family(GEOM, MED, 1, "perimeter")
        target = math.pi * GEOM.radius**2
        deficits = []
        for t in (0.01, 0.02):
            deficits.append(abs(fam.enclosed_area(t) - target))
        # quartic decay: halving t shrinks the deficit by about 16
        assert deficits[1] / max(deficits[0], 1e-300) == pytest.approx(16.0, rel=0.2)
        assert deficits[1] <= 10.0 * 0.02**4

    @pytest.mark.parametrize("k", [2, 3])
    def test_area_drift_matches_volume_coefficient(self, k):
        fam = build_family(GEOM, MED, k, "perimeter")
        coeff = _second_t_derivative(fam.enclosed_area, 0.004) / 2.0
        assert coeff == pytest.approx(volume_sap_coefficient(GEOM, k), rel=1e-4)
