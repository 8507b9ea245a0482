"""Meridian arclength, diameter brackets and the fast-marching field."""

import numpy as np
import pytest

from warpedsphere import (diameter_bounds, meridian_arclength, round_sphere,
                          scaled_sphere, surface_distance, tendril_sphere)
from warpedsphere.grids import PI


class TestMeridian:
    def test_round_arclength_is_theta(self):
        m = round_sphere()
        vals, total = meridian_arclength(m)
        assert total == pytest.approx(PI, abs=1e-10)
        assert np.max(np.abs(vals - m.theta)) < 1e-10

    def test_scaled_arclength(self):
        _, total = meridian_arclength(scaled_sphere(1.3))
        assert total == pytest.approx(1.3 * PI, abs=1e-9)

    def test_tendril_pole_distance_exceeds_pi_plus_length(self):
        # int (phi - 1) dtheta is normalized to the requested length
        _, total = meridian_arclength(tendril_sphere(2.0, 0.1, 0.3))
        assert total == pytest.approx(PI + 2.0, abs=1e-6)


class TestDiameterBounds:
    def test_round_bracket_tight(self):
        lo, hi = diameter_bounds(round_sphere())
        assert lo == pytest.approx(PI, abs=1e-9)
        assert hi >= lo
        assert hi - lo < 1e-2

    @pytest.mark.parametrize("c", [1.1, 1.5])
    def test_scaled_bracket(self, c):
        lo, hi = diameter_bounds(scaled_sphere(c))
        assert lo == pytest.approx(c * PI, abs=1e-8)
        assert hi - lo < c * 1e-2

    def test_bracket_ordered_on_references(self, reference_metrics):
        for metric in reference_metrics.values():
            lo, hi = diameter_bounds(metric)
            assert lo <= hi


class TestSurfaceDistance:
    def test_round_field_matches_great_circle(self):
        m = round_sphere()
        T, th, al = surface_distance(m, PI / 2, n_theta=161, n_alpha=161)
        # distance from (pi/2, 0): cos d = sin(theta) cos(alpha)
        TH, AL = np.meshgrid(th, al, indexing="ij")
        exact = np.arccos(np.clip(np.sin(TH) * np.cos(AL), -1.0, 1.0))
        # first-order fast marching: coarse but everywhere sane
        assert np.max(np.abs(T - exact)) < 0.08

    def test_pole_rows_constant(self):
        T, _, _ = surface_distance(round_sphere(), 1.0,
                                   n_theta=81, n_alpha=81)
        assert np.ptp(T[0]) == pytest.approx(0.0, abs=1e-12)
        assert np.ptp(T[-1]) == pytest.approx(0.0, abs=1e-12)
