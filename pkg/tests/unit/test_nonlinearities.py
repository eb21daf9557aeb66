import numpy as np
import pytest

from nonlinearities import (
    PolynomialNonlinearity,
    SineNonlinearity,
    allen_cahn,
    check_hypotheses,
    get_nonlinearity,
    make_builtin,
)


class TestBuiltins:
    """Tests for the built-in nonlinearities"""

    def test_allen_cahn_potential(self):
        """G(0) = 1/4 and the well at u = 1 is a zero of f and G"""
        nl = allen_cahn()

        assert nl.G(0.0) == pytest.approx(0.25, abs=1e-15)
        assert nl.G(1.0) == pytest.approx(0.0, abs=1e-15)
        assert nl.f(1.0) == pytest.approx(0.0, abs=1e-15)

    def test_sine_potential(self):
        """G(0) = 2/pi and G(1) = 0 for f = sin(pi u)"""
        nl = SineNonlinearity()

        assert nl.G(0.0) == pytest.approx(2.0 / np.pi, abs=1e-15)
        assert nl.G(1.0) == pytest.approx(0.0, abs=1e-15)
        assert nl.f(1.0) == 0.0

    @pytest.mark.parametrize("nl", [allen_cahn(), SineNonlinearity(), PolynomialNonlinearity((1.0, 0.0, -1.0))])
    def test_f_is_minus_derivative_of_G(self, nl):
        """f = -dG/du at 100 random points of (-M, M)"""
        rng = np.random.default_rng(3)
        u = rng.uniform(-nl.M, nl.M, 100)
        d = 1e-5

        slope = (nl.G(u + d) - nl.G(u - d)) / (2 * d)

        np.testing.assert_allclose(-slope, nl.f(u), atol=1e-7)

    @pytest.mark.parametrize("nl", [allen_cahn(), SineNonlinearity()])
    def test_near_well_potential_matches(self, nl):
        """G_near_well(g) agrees with G(M - g) where both are accurate"""
        gaps = np.array([0.5, 0.1, 1e-2])

        np.testing.assert_allclose(nl.G_near_well(gaps), nl.G(nl.M - gaps), rtol=1e-10)

    def test_near_well_keeps_relative_precision(self):
        """G(1 - g) ~ g^2 for tiny gaps instead of rounding to zero"""
        nl = allen_cahn()

        assert nl.G_near_well(1e-12) == pytest.approx(1e-24, rel=1e-6)

    def test_bounds(self):
        """sup f' is 1 for Allen-Cahn, pi for sine; sup G'' on [0, 1] is 2 for Allen-Cahn"""
        assert allen_cahn().linearization_bound() == pytest.approx(1.0)
        assert SineNonlinearity().linearization_bound() == pytest.approx(np.pi)
        assert allen_cahn().potential_curvature_bound() == pytest.approx(2.0)
        assert allen_cahn().well_curvature() == pytest.approx(2.0)


class TestFactory:
    """Tests for make_builtin / get_nonlinearity"""

    def test_builtin_lookup(self):
        """Names resolve case-insensitively, with the dashed alias"""
        assert make_builtin("allen_cahn").kind == "allen_cahn"
        assert make_builtin("Allen-Cahn").kind == "allen_cahn"
        assert isinstance(make_builtin("sine"), SineNonlinearity)

    def test_unknown_kind(self):
        """Unknown kinds list the supported ones"""
        with pytest.raises(ValueError, match="Unsupported nonlinearity: cubic"):
            make_builtin("cubic")

    def test_custom_polynomial(self):
        """custom builds an odd polynomial from the odd-power coefficients"""
        nl = get_nonlinearity("custom", (1.0, 0.0, -1.0))

        assert nl.f(0.5) == pytest.approx(0.5 - 0.5 ** 5)
        assert nl.describe() == {"kind": "custom", "M": 1.0, "coeffs": [1.0, 0.0, -1.0]}

    def test_custom_needs_coefficients(self):
        """An empty or all-zero coefficient list is rejected"""
        with pytest.raises(ValueError, match="nonzero odd coefficient"):
            get_nonlinearity("custom", ())
        with pytest.raises(ValueError, match="nonzero odd coefficient"):
            PolynomialNonlinearity((0.0, 0.0))

    def test_non_positive_well(self):
        """M must be positive"""
        with pytest.raises(ValueError, match="Well location M must be positive"):
            PolynomialNonlinearity((1.0, -1.0), M=0.0)


class TestHypotheses:
    """Tests for check_hypotheses"""

    @pytest.mark.parametrize("nl", [allen_cahn(), SineNonlinearity()])
    def test_builtins_pass(self, nl):
        """Allen-Cahn and sine satisfy H1-H3"""
        report = check_hypotheses(nl)

        assert report.all_passed
        assert report.h1.witness is None

    def test_quintic_passes(self):
        """f = u - u^5 has G = 1/3 - u^2/2 + u^6/6 >= 0 and is concave on (0, 1)"""
        nl = PolynomialNonlinearity((1.0, 0.0, -1.0))

        assert nl.G(0.0) == pytest.approx(1.0 / 3.0)
        assert check_hypotheses(nl).all_passed

    def test_negative_potential_fails_h2(self):
        """f = u^3 - u has G = -(1 - u^2)^2 / 4, failing H2 inside (-1, 1)"""
        report = check_hypotheses(PolynomialNonlinearity((-1.0, 1.0)))

        assert report.h1.passed
        assert not report.h2.passed
        assert abs(report.h2.witness) < 1.0
        assert report.h2.worst_value <= 0.0

    def test_convex_near_zero_fails_h3(self):
        """f = u + u^3 - 2u^5 has f'' = 6u - 40u^3 > 0 near 0+"""
        report = check_hypotheses(PolynomialNonlinearity((1.0, 1.0, -2.0)))

        assert report.h1.passed
        assert report.h2.passed
        assert not report.h3.passed
        assert 0.0 < report.h3.witness < np.sqrt(6.0 / 40.0)

    def test_report_dict(self):
        """to_dict names the hypotheses and the overall verdict"""
        payload = check_hypotheses(allen_cahn()).to_dict()

        assert set(payload) == {"H1", "H2", "H3", "all_passed"}
        assert payload["H3"]["passed"] is True

    def test_too_few_samples(self):
        """samples below 3 are rejected"""
        with pytest.raises(ValueError, match="samples must be >= 3"):
            check_hypotheses(allen_cahn(), samples=2)
