import pytest

from utils.errors import (
    EXIT_CONFIG,
    EXIT_INTERNAL,
    EXIT_SOLVER,
    ConfigError,
    DegenerateWell,
    EigenConvergenceFailure,
    GridTooCoarse,
    SaddleLabError,
    UnsupportedDomain,
    exit_code_for,
)


class TestExitCodes:
    """Tests for exit_code_for"""

    @pytest.mark.parametrize("error", [ConfigError("grid.m"), ValueError("h must satisfy")])
    def test_configuration_errors(self, error):
        """Config errors and violated preconditions exit with 2"""
        assert exit_code_for(error) == EXIT_CONFIG == 2

    @pytest.mark.parametrize("error", [
        DegenerateWell("well"), GridTooCoarse("coarse"), UnsupportedDomain("y_max"), EigenConvergenceFailure("slow"),
    ])
    def test_solver_failures(self, error):
        """Numerical failures exit with 3"""
        assert exit_code_for(error) == EXIT_SOLVER == 3

    def test_anything_else(self):
        """Unexpected errors exit with 1"""
        assert exit_code_for(RuntimeError("boom")) == EXIT_INTERNAL == 1

    def test_hierarchy(self):
        """Every computational failure derives from SaddleLabError"""
        assert issubclass(GridTooCoarse, SaddleLabError)
        assert not issubclass(SaddleLabError, ValueError)
