import numpy as np
import pytest

from geometry.grid import build_grid
from stability.eta import EtaFamily, PiecewiseLinearEta
from stability.forms import (
    CallableTestFunction,
    QuadratureOptions,
    ScaledProfileTestFunction,
    quadratic_form_ibp,
    quadratic_form_yz,
    wedge_constant,
)
from solvers import reflect_odd, zero_field
from utils.errors import UnsupportedDomain

TRAPEZOID = PiecewiseLinearEta((1.0, 3.0, 8.0, 10.0), (0.0, 1.0, 1.0, 0.0))


def _as_callable(xi: ScaledProfileTestFunction) -> CallableTestFunction:
    return CallableTestFunction(xi.value, xi.dy, xi.dz, xi.support_y, xi.breakpoints_y)


class TestWedgeConstant:
    """Tests for c_m = 2^{m-1} / a_m"""

    def test_values(self):
        """c_1 = 1/4 and c_2 = 1 / (2 pi^2)"""
        assert wedge_constant(1) == pytest.approx(0.25)
        assert wedge_constant(2) == pytest.approx(1.0 / (2.0 * np.pi ** 2))


class TestSeparableForm:
    """Tests for Q_{u0}(eta(y / a) u0'(z))"""

    def test_zero_test_function(self, ac, ac_profile):
        """xi = 0 gives Q = 0"""
        eta = PiecewiseLinearEta((1.0, 2.0, 3.0), (0.0, 0.0, 0.0))

        report = quadratic_form_yz(ac_profile, ScaledProfileTestFunction(eta, ac_profile), ac, 2)

        assert report.value == 0.0
        assert report.norm_sq == 0.0

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_direct_matches_integration_by_parts(self, ac, ac_profile, m):
        """The direct and integrated-by-parts forms agree"""
        xi = ScaledProfileTestFunction(TRAPEZOID, ac_profile, a=5.0)

        direct = quadratic_form_yz(ac_profile, xi, ac, m)
        ibp = quadratic_form_ibp(ac_profile, xi, ac, m)

        assert direct.method == "separable" and ibp.method == "ibp"
        assert direct.value == pytest.approx(ibp.value, rel=1e-5, abs=1e-8)
        assert direct.norm_sq == pytest.approx(ibp.norm_sq, rel=1e-10)

    @pytest.mark.parametrize("m", [1, 2])
    def test_composite_rule_agrees(self, ac, ac_profile, m):
        """The 2-D composite rule reproduces the separable moments"""
        xi = ScaledProfileTestFunction(TRAPEZOID, ac_profile, a=1.0)

        separable = quadratic_form_yz(ac_profile, xi, ac, m)
        composite = quadratic_form_yz(ac_profile, _as_callable(xi), ac, m)

        assert composite.method == "composite"
        assert composite.value == pytest.approx(separable.value, rel=1e-6, abs=1e-9)

    def test_report_identities(self, ac, ac_profile):
        """value is the sum of its terms; scaled and full-space values rescale it"""
        xi = ScaledProfileTestFunction(EtaFamily(0.05, 100.0, 0.75), ac_profile, a=4.0)

        report = quadratic_form_yz(ac_profile, xi, ac, 2)

        assert report.value == pytest.approx(report.gradient_term + report.potential_term)
        assert report.a_scaling == pytest.approx(4.0)
        assert report.scaled == pytest.approx(report.value / 4.0)
        assert report.full_space_value == pytest.approx(report.value / wedge_constant(2))
        assert report.to_dict()["method"] == "separable"

    def test_higher_order_is_stable(self, ac, ac_profile):
        """Raising the Gauss-Legendre order does not move the value"""
        xi = ScaledProfileTestFunction(TRAPEZOID, ac_profile, a=5.0)

        default = quadratic_form_yz(ac_profile, xi, ac, 2)
        refined = quadratic_form_yz(ac_profile, xi, ac, 2, QuadratureOptions(order=14))

        assert refined.value == pytest.approx(default.value, rel=1e-8)

    def test_truncation_bound_is_tiny(self, ac, ac_profile):
        """Profile tails beyond |z| = 20 contribute below 1e-10"""
        xi = ScaledProfileTestFunction(TRAPEZOID, ac_profile, a=5.0)

        assert quadratic_form_yz(ac_profile, xi, ac, 2).truncation_bound < 1e-10


class TestFormErrors:
    """Preconditions of quadratic_form_yz"""

    def test_support_beyond_y_max(self, ac, ac_profile):
        """A test function reaching past y_max is refused"""
        xi = ScaledProfileTestFunction(TRAPEZOID, ac_profile)

        with pytest.raises(UnsupportedDomain, match="beyond y_max"):
            quadratic_form_yz(ac_profile, xi, ac, 2, y_max=5.0)

    def test_unknown_source(self, ac, ac_profile):
        """Sources are profiles or saddle fields"""
        xi = ScaledProfileTestFunction(TRAPEZOID, ac_profile)

        with pytest.raises(ValueError, match="Unsupported source: str"):
            quadratic_form_yz("tanh", xi, ac, 2)

    def test_field_dimension_mismatch(self, ac, ac_profile):
        """A field for m = 1 cannot serve a form in R^4"""
        saddle = reflect_odd(zero_field(build_grid(1, 8, 0.25)))
        xi = ScaledProfileTestFunction(TRAPEZOID, ac_profile, a=0.2)

        with pytest.raises(ValueError, match="field has m = 1"):
            quadratic_form_yz(saddle, xi, ac, 2)

    def test_field_support_outside_disk(self, ac, ac_profile):
        """A field source only knows y up to its disk"""
        saddle = reflect_odd(zero_field(build_grid(1, 8, 0.25)))
        xi = ScaledProfileTestFunction(TRAPEZOID, ac_profile)

        with pytest.raises(UnsupportedDomain):
            quadratic_form_yz(saddle, xi, ac, 1)

    def test_non_positive_scale(self, ac_profile):
        """a must be positive"""
        with pytest.raises(ValueError, match="scale a must be positive"):
            ScaledProfileTestFunction(TRAPEZOID, ac_profile, a=0.0)
