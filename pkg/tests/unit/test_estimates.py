import numpy as np
import pytest

from estimates import (
    discretization_slack,
    modica_check,
    pointwise_bound_check,
    profile_field,
    run_checks,
    strict_bound_check,
    supersolution_check,
    supersolution_closed_form,
    supersolution_residual,
)
from geometry.grid import NodeKind, build_grid
from solvers import Field, reflect_odd, zero_field


class TestModica:
    """Tests for |grad u|^2 / 2 <= G(u)"""

    def test_equality_for_the_profile(self, ac, ac_profile):
        """u0((s - t) / sqrt 2) with exact gradients attains equality"""
        fld = profile_field(ac_profile, 2, 16.0, 0.25)

        report = modica_check(fld, ac)

        assert abs(report.worst_violation) <= 1e-9
        assert report.passed

    def test_zero_field(self, ac):
        """For u = 0 the worst value is -G(0) = -1/4"""
        saddle = reflect_odd(zero_field(build_grid(2, 16, 0.5)))

        report = modica_check(saddle, ac)

        assert report.worst_violation == pytest.approx(-0.25)
        assert report.passed
        assert report.nodes_checked > 0

    def test_steep_field_fails(self, ac, ac_profile):
        """u0 of twice the cone distance has |grad u|^2 / 2 = 4 G(u); the excess 3 G(0) peaks on the cone"""
        fld = profile_field(ac_profile, 2, 16.0, 0.25)
        S, T = fld.coordinates()
        z = np.sqrt(2.0) * (S - T)
        fld.values = np.where(fld.inside, ac_profile.value(z), 0.0)
        fld.grad_sq = np.where(fld.inside, 4.0 * ac_profile.derivative(z) ** 2, 0.0)

        report = modica_check(fld, ac, tolerance=1e-6)

        assert not report.passed
        assert report.worst_violation == pytest.approx(0.75, rel=1e-6)


class TestPointwiseBound:
    """Tests for |u| <= u0(|s - t| / sqrt 2)"""

    def test_profile_is_extremal(self, ac_profile):
        """The profile itself meets the bound with equality"""
        fld = profile_field(ac_profile, 2, 16.0, 0.25)

        report = pointwise_bound_check(fld, ac_profile)

        assert abs(report.worst_violation) <= 1e-12
        assert report.passed

    def test_scaled_profile_fails(self, ac_profile):
        """1.2 u0 violates the bound by about 0.2 far from the cone"""
        fld = profile_field(ac_profile, 2, 16.0, 0.25, scale=1.2)

        report = pointwise_bound_check(fld, ac_profile, tolerance=1e-6)

        assert not report.passed
        assert report.worst_violation == pytest.approx(0.2, abs=1e-3)
        s, t = report.worst_node
        assert abs(s - t) / np.sqrt(2.0) > 8.0


class TestSupersolution:
    """Tests for the supersolution residual of u0((s - t) / sqrt 2)"""

    def test_matches_closed_form(self, ac, ac_profile):
        """The reduced-Laplacian residual equals (m - 1)(u0'(z) / sqrt 2)(1/t - 1/s)"""
        grid = build_grid(2, 16, 0.5)
        nodes = (grid.kind == NodeKind.INTERIOR) & (grid.j > 0)
        s, t = grid.s[nodes], grid.t[nodes]

        residual = supersolution_residual(ac_profile, ac, 2, s, t)

        np.testing.assert_allclose(residual, supersolution_closed_form(ac_profile, 2, s, t), atol=1e-10)
        assert np.all(residual >= -1e-15)

    def test_value_at_node(self, ac, ac_profile):
        """m = 2 at (2, 1): u0'(1 / sqrt 2)(1 - 1/2) / sqrt 2"""
        expected = 1.0 / (np.sqrt(2.0) * np.cosh(0.5) ** 2) * 0.5 / np.sqrt(2.0)

        assert supersolution_residual(ac_profile, ac, 2, 2.0, 1.0) == pytest.approx(expected, abs=1e-8)
        assert expected == pytest.approx(0.1966, abs=1e-3)

    def test_exact_in_two_dimensions(self, ac, ac_profile):
        """For m = 1, u0(z) solves the equation, so the residual vanishes"""
        s = np.array([1.0, 3.0, 7.5])
        t = np.array([0.5, 1.0, 2.0])

        np.testing.assert_allclose(supersolution_residual(ac_profile, ac, 1, s, t), 0.0, atol=1e-12)

    def test_check_passes(self, ac, ac_profile):
        """The supersolution check passes on the m = 1 and m = 2 grids"""
        for m in (1, 2):
            report = supersolution_check(ac_profile, ac, build_grid(m, 16, 0.5))
            assert report.passed
            assert report.worst_violation <= 1e-12


class TestStrictBound:
    """Tests for |u| < M at interior nodes"""

    def test_zero_field_passes(self, ac):
        """u = 0 is well inside (-1, 1)"""
        report = strict_bound_check(zero_field(build_grid(1, 8, 0.25)), ac)

        assert report.passed
        assert report.tolerance_used == 0.0

    def test_value_at_well_fails(self, ac):
        """An interior node at u = M violates the strict bound"""
        grid = build_grid(1, 8, 0.25)
        values = np.zeros(grid.n_nodes)
        values[grid.node_index(4.0, 1.0)] = 1.0

        report = strict_bound_check(Field(grid, values), ac)

        assert not report.passed
        assert report.worst_node == (4.0, 1.0)


class TestReports:
    """Tests for report helpers"""

    def test_slack(self):
        """10 h^2 times the curvature scale, never below 10 h^2"""
        assert discretization_slack(0.1) == pytest.approx(0.1)
        assert discretization_slack(0.1, 4.0) == pytest.approx(0.4)
        assert discretization_slack(0.1, 0.5) == pytest.approx(0.1)

    def test_run_checks_order(self, ac, ac_profile, small_solve):
        """run_checks reports the four checks in a fixed order"""
        fld, _ = small_solve

        reports = run_checks(fld, reflect_odd(fld), ac_profile, ac)

        assert [r.name for r in reports] == ["modica", "pointwise_bound", "supersolution", "strict_bound"]
        assert all(r.passed for r in reports)

    def test_to_dict(self, ac):
        """to_dict uses the key 'pass'"""
        payload = strict_bound_check(zero_field(build_grid(1, 8, 0.25)), ac).to_dict()

        assert payload["pass"] is True
        assert payload["name"] == "strict_bound"
        assert len(payload["worst_node"]) == 2
