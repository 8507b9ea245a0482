"""Check suites, discretization tolerance and sequence experiments."""

import numpy as np
import pytest

from warpedsphere import (ClassParams, RadialGrid, SequenceSpec, bump_sphere,
                          check_global_suite, check_goodset_suite,
                          check_identity_suite, check_polar_suite,
                          constant_ledger, round_sphere, run_all_checks,
                          run_sequence, solve_quadrature, tol_disc)
from warpedsphere.grids import PI

from conftest import REFERENCE_NAMES

WIDE_PARAMS = ClassParams(volume_max=40.0, diameter_max=10.0,
                          mass_max=3.0, cheeger_min=0.1)


@pytest.fixture(scope="module")
def wide_ledger():
    return constant_ledger(WIDE_PARAMS)


class TestTolDisc:
    def test_floor(self):
        metric = round_sphere(grid=RadialGrid.uniform(100001))
        assert tol_disc(metric) == pytest.approx(1e-6)

    def test_quadratic_in_spacing(self):
        coarse = tol_disc(round_sphere(grid=RadialGrid.uniform(501)))
        fine = tol_disc(round_sphere(grid=RadialGrid.uniform(1001)))
        assert coarse == pytest.approx(4.0 * fine, rel=0.02)


class TestIdentitySuite:
    @pytest.mark.parametrize("name", REFERENCE_NAMES)
    def test_passes_on_references(self, reference_metrics,
                                  reference_potentials, name):
        checks = check_identity_suite(reference_metrics[name],
                                      reference_potentials[name])
        assert {c.label for c in checks} == {"eq_2_2", "eq_2_3", "eq_2_4"}
        for c in checks:
            assert c.verdict == "pass", (name, c.label, c.margin)

    def test_margins_shrink_quadratically(self):
        # scaled sphere: smooth profiles, clean O(h^2) margin trend
        margins = {}
        for n in (501, 1001, 2001):
            from warpedsphere import scaled_sphere
            metric = scaled_sphere(1.1, grid=RadialGrid.uniform(n))
            pot = solve_quadrature(metric)
            for c in check_identity_suite(metric, pot):
                margins.setdefault(c.label, []).append(c.margin)
        for label, ms in margins.items():
            d1 = abs(ms[0] - ms[1])
            d2 = abs(ms[1] - ms[2])
            assert d2 < d1, label
            assert 2.0 <= d1 / d2 <= 8.0, label  # order 2 within band


class TestFullSuite:
    @pytest.mark.parametrize("name", REFERENCE_NAMES)
    def test_all_checks_pass(self, reference_metrics, reference_potentials,
                             wide_ledger, name):
        checks = run_all_checks(reference_metrics[name],
                                reference_potentials[name], wide_ledger)
        failed = [(c.label, c.margin) for c in checks
                  if c.verdict == "fail"]
        assert not failed, (name, failed)

    def test_stable_order_and_labels(self, round_metric, round_potential,
                                     wide_ledger):
        checks = run_all_checks(round_metric, round_potential, wide_ledger)
        labels = [c.label for c in checks]
        assert labels[:3] == ["eq_2_2", "eq_2_3", "eq_2_4"]
        assert labels == [c.label for c in
                          run_all_checks(round_metric, round_potential,
                                         wide_ledger)]
        assert len(labels) == len(set(labels))

    @pytest.mark.parametrize("name", REFERENCE_NAMES)
    def test_shell_colatitudes_in_band(self, reference_metrics,
                                       reference_potentials, wide_ledger,
                                       name):
        checks = check_polar_suite(reference_metrics[name],
                                   reference_potentials[name], wide_ledger)
        by_label = {c.label: c for c in checks}
        for tag in ("p", "mp"):
            sigma = by_label[f"lemma_4_1_{tag}"].inputs["sigma"]
            assert PI / 8 <= sigma <= PI / 4

    def test_witnesses_nonempty_when_bound_positive(self, reference_metrics,
                                                    reference_potentials,
                                                    wide_ledger):
        for name in REFERENCE_NAMES:
            checks = check_goodset_suite(reference_metrics[name],
                                         reference_potentials[name],
                                         wide_ledger)
            for c in checks:
                if c.label.startswith("lemma_5_1_witness") \
                        and c.verdict != "skipped" \
                        and c.inputs.get("lower_bound", 0.0) > 0.0:
                    assert c.inputs["nonempty"], (name, c.label)


class TestGlobalSuite:
    def test_verdict_semantics(self):
        from warpedsphere.verification import _check
        assert _check("x", 1.0, 2.0, 1e-9).verdict == "pass"
        assert _check("x", 2.0, 1.0, 1e-9).verdict == "fail"
        # a violation inside the tolerance band still passes
        assert _check("x", 1.0 + 5e-10, 1.0, 1e-9).verdict == "pass"
        assert _check("x", 2.0, 1.0, 1e-9).margin == pytest.approx(-1.0)

    def test_tolerance_override(self, round_metric, round_potential,
                                wide_ledger):
        checks = check_global_suite(round_metric, round_potential,
                                    wide_ledger, tolerance=1e-3)
        assert all(c.tolerance == 1e-3 for c in checks)


class TestSequences:
    def test_bump_schedule_converges(self):
        spec = SequenceSpec(
            family="bump",
            schedule=tuple({"eta": 2.0 ** -i} for i in range(1, 6)))
        report = run_sequence(spec, ClassParams(40.0, 10.0, 1.0, 1.0))
        assert report.m_decreasing
        assert report.hypotheses_ok
        gaps = [e.volume_gap for e in report.entries]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert np.isfinite(report.fitted_k) and report.fitted_k > 0.0
        assert all(g <= report.fitted_k * e.m ** (1.0 / 24.0) + 1e-12
                   for g, e in zip(gaps, report.entries))

    def test_invalid_member_reported_in_place(self):
        spec = SequenceSpec(
            family="tendril",
            schedule=({"length": 1.0, "width": 0.1},
                      {"length": 1.0, "width": 0.1, "theta0": 0.01},
                      {"length": 1.0, "width": 0.2}))
        report = run_sequence(spec, WIDE_PARAMS)
        assert len(report.entries) == 3
        assert not report.entries[1].valid
        assert "ConstructionError" in report.entries[1].error
        assert report.entries[0].valid and report.entries[2].valid

    def test_empty_schedule_rejected(self):
        with pytest.raises(ValueError):
            SequenceSpec(family="bump", schedule=())

    def test_bubble_schedule_membership_failure(self):
        spec = SequenceSpec(
            family="bubble",
            schedule=tuple({"area_radius": float(i), "neck_theta": 0.05}
                           for i in (1, 2, 3)))
        report = run_sequence(spec, ClassParams(40.0, 10.0, 1.0, 1.0))
        assert not report.hypotheses_ok
        assert all(e.cheeger_fails for e in report.entries)
