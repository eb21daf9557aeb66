import numpy as np
import pytest
from scipy.integrate import solve_ivp

from nonlinearities import PolynomialNonlinearity, allen_cahn
from profiles.profile1d import build_profile, one_d_solution, profile_energy_line, profile_sector_values
from utils.errors import DegenerateWell, QuadratureSingularity


class TestAllenCahnProfile:
    """The Allen-Cahn profile has the closed form tanh(tau / sqrt 2)"""

    def test_matches_tanh(self, ac_profile):
        """u0 agrees with tanh(tau / sqrt 2) on and off the grid"""
        tau = np.linspace(-8.0, 8.0, 1001) + 0.0037

        np.testing.assert_allclose(ac_profile.value(tau), np.tanh(tau / np.sqrt(2.0)), atol=1e-8)
        assert ac_profile.value(np.sqrt(2.0)) == pytest.approx(np.tanh(1.0), abs=1e-8)

    def test_derivative_matches_closed_form(self, ac_profile):
        """u0' = sech^2(tau / sqrt 2) / sqrt 2"""
        tau = np.linspace(-6.0, 6.0, 241)
        exact = 1.0 / (np.sqrt(2.0) * np.cosh(tau / np.sqrt(2.0)) ** 2)

        np.testing.assert_allclose(ac_profile.derivative(tau), exact, atol=1e-8)

    def test_normalization_and_oddness(self, ac_profile):
        """u0(0) = 0 and u0(-tau) = -u0(tau)"""
        tau = np.linspace(0.0, 19.0, 77)

        assert abs(ac_profile.value(0.0)) <= 1e-14
        np.testing.assert_allclose(ac_profile.value(-tau), -ac_profile.value(tau), atol=1e-12)

    def test_monotone_and_bounded(self, ac_profile):
        """u0 is strictly increasing with |u0| < M, also in the tails"""
        assert np.all(np.diff(ac_profile.u0) > 0)
        assert np.all(ac_profile.u0dot > 0)
        assert np.all(np.abs(ac_profile.value(np.array([-60.0, -25.0, 25.0, 60.0]))) < 1.0)

    def test_residuals(self, ac_profile):
        """Hamiltonian, ODE and zero-mode residuals are at rounding or truncation level"""
        assert ac_profile.hamiltonian_residual() <= 1e-10
        assert ac_profile.ode_residual() <= 1e-6
        assert ac_profile.zero_mode_residual() <= 1e-6

    def test_decay_rate(self, ac_profile):
        """u0' decays like exp(-sqrt(G''(1)) |tau|) = exp(-sqrt 2 |tau|)"""
        assert ac_profile.decay_c == pytest.approx(np.sqrt(2.0), rel=1e-3)
        bound = ac_profile.decay_C * np.exp(-ac_profile.decay_c * np.abs(ac_profile.tau_grid))
        assert np.all(ac_profile.u0dot <= bound)

    def test_line_energy(self, ac_profile):
        """The 1-D energy equals int u0'^2 = 2 sqrt 2 / 3"""
        assert profile_energy_line(ac_profile) == pytest.approx(2.0 * np.sqrt(2.0) / 3.0, abs=1e-8)

    def test_line_energy_insensitive_to_tau_max(self, ac, ac_profile):
        """Doubling tau_max changes the line energy by less than 1e-8"""
        wide = build_profile(ac, tau_max=40.0, n_nodes=8001)

        assert abs(profile_energy_line(wide) - profile_energy_line(ac_profile)) < 1e-8

    def test_even_node_count_is_bumped(self, ac):
        """An even node count gains one node so that tau = 0 stays on the grid"""
        p = build_profile(ac, tau_max=10.0, n_nodes=400)

        assert p.tau_grid.size == 401
        assert p.tau_grid[200] == 0.0

    def test_summary(self, ac_profile):
        """summary reports the grid, decay and residuals"""
        summary = ac_profile.summary()

        assert summary["n_nodes"] == 4001
        assert summary["tau_max"] == pytest.approx(20.0)
        assert summary["max_hamiltonian_residual"] <= 1e-10
        assert summary["nonlinearity"]["kind"] == "allen_cahn"


class TestSineProfile:
    """Tests for the sine profile against an independent ODE integration"""

    def test_matches_initial_value_integration(self, sine, sine_profile):
        """u0(1) agrees with a DOP853 integration of u'' = -sin(pi u) from u(0) = 0, u'(0) = sqrt(2 G(0))"""
        def rhs(_, y):
            return [y[1], -np.sin(np.pi * y[0])]

        start = [0.0, float(np.sqrt(2.0 * sine.G(0.0)))]
        sol = solve_ivp(rhs, (0.0, 1.0), start, method="DOP853", rtol=1e-12, atol=1e-14)

        assert sine_profile.value(1.0) == pytest.approx(sol.y[0, -1], abs=1e-6)

    def test_residuals(self, sine_profile):
        """The sine profile satisfies the Hamiltonian identity to rounding"""
        assert sine_profile.hamiltonian_residual() <= 1e-10
        assert sine_profile.zero_mode_residual() <= 1e-6

    def test_decay_rate(self, sine_profile):
        """G''(1) = pi gives the decay rate sqrt(pi)"""
        assert sine_profile.decay_c == pytest.approx(np.sqrt(np.pi), rel=1e-3)

    def test_equipartition(self, sine_profile):
        """The line energy equals int u0'^2 because u0'^2 / 2 = G(u0)"""
        kinetic = np.trapz(sine_profile.u0dot ** 2, sine_profile.tau_grid)

        assert profile_energy_line(sine_profile) == pytest.approx(kinetic, rel=1e-6)


class TestBuildProfileErrors:
    """Preconditions and failures of build_profile"""

    def test_short_grid(self, ac):
        """tau_max below 5 is rejected"""
        with pytest.raises(ValueError, match="tau_max must be >= 5"):
            build_profile(ac, tau_max=4.0)

    def test_few_nodes(self, ac):
        """n_nodes below 65 is rejected"""
        with pytest.raises(ValueError, match="n_nodes must be >= 65"):
            build_profile(ac, n_nodes=33)

    def test_interior_zero_of_potential(self):
        """f = u^3 - u has a non-positive potential inside (-1, 1)"""
        with pytest.raises(QuadratureSingularity):
            build_profile(PolynomialNonlinearity((-1.0, 1.0)))

    def test_degenerate_well(self):
        """f = u (1 - u^2)^2 has G''(1) = 0"""
        nl = PolynomialNonlinearity((1.0, -2.0, 1.0))

        with pytest.raises(DegenerateWell, match="degenerate"):
            build_profile(nl, check=False)


class TestOneDSolution:
    """Tests for u_{b,c}(x) = u0(b.x + c)"""

    def test_examples(self, ac_profile):
        """Origin, the tanh point, and a cancelling shift"""
        e1 = np.array([1.0, 0.0, 0.0, 0.0])

        assert abs(one_d_solution(ac_profile, e1, 0.0, np.zeros(4))) <= 1e-14
        assert one_d_solution(ac_profile, e1, 0.0, np.array([np.sqrt(2.0), 0, 0, 0])) == pytest.approx(
            np.tanh(1.0), abs=1e-8)
        assert abs(one_d_solution(ac_profile, e1, 1.0, np.array([-1.0, 0, 0, 0]))) <= 1e-14

    def test_rows_of_points(self, ac_profile):
        """Arrays of points evaluate row by row"""
        b = np.array([0.6, 0.8])
        x = np.array([[1.0, 0.0], [0.0, 1.0]])

        np.testing.assert_allclose(one_d_solution(ac_profile, b, 0.0, x), ac_profile.value(np.array([0.6, 0.8])))

    def test_rejects_non_unit_direction(self, ac_profile):
        """b must be a unit vector"""
        with pytest.raises(ValueError, match="unit vector"):
            one_d_solution(ac_profile, np.array([1.0, 1.0]), 0.0, np.zeros(2))

    def test_rejects_dimension_mismatch(self, ac_profile):
        """x and b must live in the same space"""
        with pytest.raises(ValueError, match="dimension"):
            one_d_solution(ac_profile, np.array([1.0, 0.0]), 0.0, np.zeros(3))


class TestSectorValues:
    """profile_sector_values clamps u0((s - t) / sqrt 2) to [0, M]"""

    def test_clamped(self, ac_profile):
        """Values are u0 of the cone distance for s > t and 0 for s < t"""
        s = np.array([1.0, 2.0, 0.5])
        t = np.array([0.0, 2.0, 1.5])

        values = profile_sector_values(ac_profile, s, t)

        assert values[0] == pytest.approx(np.tanh(0.5), abs=1e-8)
        assert values[1] == pytest.approx(0.0, abs=1e-14)
        assert values[2] == 0.0

    def test_scaled(self, ac_profile):
        """A scale above one is clamped at M"""
        values = profile_sector_values(ac_profile, np.array([20.0]), np.array([0.0]), scale=1.2)

        assert values[0] == 1.0


def test_allen_cahn_is_default_profile_input():
    """build_profile accepts a freshly built nonlinearity"""
    p = build_profile(allen_cahn(), tau_max=8.0, n_nodes=161)

    assert p.M == 1.0
    assert p.spacing == pytest.approx(0.1)
