import pytest

from nonlinearities import PolynomialNonlinearity
from stability import PROBE_FAMILIES, cone_vanishing_stability_probe


class TestStabilityProbe:
    """Tests for random sampling of the restricted second variation"""

    @pytest.mark.parametrize("family", PROBE_FAMILIES)
    def test_minimizer_passes(self, ac, small_solve, family):
        """Perturbations vanishing on the cone do not lower the energy of the minimizer"""
        fld, _ = small_solve

        report = cone_vanishing_stability_probe(fld, ac, trials=50, family=family)

        assert report.passed
        assert report.min_value >= -report.slack
        assert report.slack == pytest.approx(10.0 * 0.25 ** 2)
        assert 0 <= report.worst_trial < 50

    def test_seeded(self, ac, small_solve):
        """The same seed gives the same trials"""
        fld, _ = small_solve

        first = cone_vanishing_stability_probe(fld, ac, trials=20, seed=7)
        second = cone_vanishing_stability_probe(fld, ac, trials=20, seed=7)

        assert first.min_value == second.min_value
        assert first.worst_trial == second.worst_trial

    def test_trials_must_be_positive(self, ac, small_solve):
        """At least one trial"""
        with pytest.raises(ValueError, match="trials must be >= 1"):
            cone_vanishing_stability_probe(small_solve[0], ac, trials=0)

    def test_unknown_family(self, ac, small_solve):
        """Unknown families list the supported ones"""
        with pytest.raises(ValueError, match="Unsupported probe family: fourier"):
            cone_vanishing_stability_probe(small_solve[0], ac, family="fourier")

    def test_requires_h3(self, small_solve):
        """f = u + u^3 - 2u^5 is convex near 0+, so the check refuses it"""
        with pytest.raises(ValueError, match="H3"):
            cone_vanishing_stability_probe(small_solve[0], PolynomialNonlinearity((1.0, 1.0, -2.0)))

    def test_report_dict(self, ac, small_solve):
        """to_dict uses the key 'pass'"""
        payload = cone_vanishing_stability_probe(small_solve[0], ac, trials=5).to_dict()

        assert payload["pass"] is True
        assert payload["family"] == "polynomial"
        assert payload["cone_vanishing"] is True
