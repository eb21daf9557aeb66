"""
Pytest configuration for integration tests.

Converged saddle fields on the desk-scale grids, solved once per session:
R^4 on B_16 with h = 1/8 and on B_24 with h = 1/4, and R^2 on B_30 with h = 1/4.
"""
import pytest

from geometry.grid import build_grid
from solvers import SolverOptions, initial_guess, minimize, reflect_odd
from utils.logger import get_logger

logger = get_logger(__name__)


def _solve(nl, m, R, h):
    grid = build_grid(m, R, h)
    logger.info("Solving saddle...", m=m, R=R, h=h, n_nodes=grid.n_nodes)
    fld, report = minimize(initial_guess(grid, nl), nl, SolverOptions(method="newton"))
    logger.info("Saddle solved", m=m, iterations=report.iterations, energy=report.energy, converged=report.converged)
    return fld, report


@pytest.fixture(scope="session")
def saddle_m2(ac):
    """(field, SolveReport) for m = 2, R = 16, h = 0.125."""
    return _solve(ac, 2, 16.0, 0.125)


@pytest.fixture(scope="session")
def saddle_m1(ac):
    """(field, SolveReport) for m = 1, R = 30, h = 0.25."""
    return _solve(ac, 1, 30.0, 0.25)


@pytest.fixture(scope="session")
def reflected_m2(saddle_m2):
    return reflect_odd(saddle_m2[0])


@pytest.fixture(scope="session")
def saddle_m2_r24(ac):
    """(field, SolveReport) for m = 2, R = 24, h = 0.25."""
    return _solve(ac, 2, 24.0, 0.25)
