"""
Shared fixtures: nonlinearities, tabulated profiles and one small converged solve.

Profiles and solves are session-scoped; building them once keeps the unit
suite fast.
"""
import pytest

from geometry.grid import build_grid
from nonlinearities import SineNonlinearity, allen_cahn
from profiles.profile1d import build_profile
from solvers import SolverOptions, initial_guess, minimize
from utils.logger import get_logger

logger = get_logger(__name__)


@pytest.fixture(scope="session")
def ac():
    return allen_cahn()


@pytest.fixture(scope="session")
def sine():
    return SineNonlinearity()


@pytest.fixture(scope="session")
def ac_profile(ac):
    """Allen-Cahn profile on the default grid, tau in [-20, 20]."""
    logger.info("Building Allen-Cahn profile...")
    return build_profile(ac)


@pytest.fixture(scope="session")
def sine_profile(sine):
    logger.info("Building sine profile...")
    return build_profile(sine)


@pytest.fixture(scope="session")
def small_solve(ac):
    """
    Converged m = 1 saddle on B_8 with h = 0.25.

    Returns (field, SolveReport).
    """
    grid = build_grid(1, 8.0, 0.25)
    fld, report = minimize(initial_guess(grid, ac), ac, SolverOptions(method="newton"))
    logger.info("Small solve finished", iterations=report.iterations, converged=report.converged)
    return fld, report
