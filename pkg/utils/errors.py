"""
Exception hierarchy for saddle-lab.

Plain argument preconditions raise ValueError; everything a computation can
legitimately run into derives from SaddleLabError.
"""


class SaddleLabError(Exception):
    """Base class for all saddle-lab failures."""


class ConfigError(SaddleLabError):
    """Experiment configuration does not parse or fails validation."""


class QuadratureSingularity(SaddleLabError):
    """The profile quadrature met an interior zero of the potential."""


class InversionFailure(SaddleLabError):
    """The profile phase map could not be inverted monotonically."""


class DegenerateWell(SaddleLabError):
    """G''(M) is not positive, so the profile has no exponential decay."""


class DimensionMismatch(SaddleLabError):
    """A point does not live in R^{2m}."""


class DomainViolation(SaddleLabError):
    """A (y, z) pair lies outside the wedge -y <= z <= y."""


class GridTooCoarse(SaddleLabError):
    """The triangle grid has too few interior nodes."""


class NonDecreaseFailure(SaddleLabError):
    """A descent step increased the energy beyond rounding slack."""


class UnsupportedDomain(SaddleLabError):
    """A test function reaches beyond the region where its field is known."""


class EigenConvergenceFailure(SaddleLabError):
    """Inverse iteration did not converge within the iteration budget."""


# exit codes of the command-line surface
EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFICATION = 4

SOLVER_FAILURES = (
    QuadratureSingularity,
    InversionFailure,
    DegenerateWell,
    GridTooCoarse,
    NonDecreaseFailure,
    UnsupportedDomain,
    EigenConvergenceFailure,
    DimensionMismatch,
    DomainViolation,
)


def exit_code_for(error: BaseException) -> int:
    """Map an exception raised by a stage to the process exit code."""
    if isinstance(error, (ConfigError, ValueError)):
        return EXIT_CONFIG
    if isinstance(error, SOLVER_FAILURES):
        return EXIT_SOLVER
    return EXIT_INTERNAL
