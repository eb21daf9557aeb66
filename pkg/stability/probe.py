"""
Random probe of the second variation over perturbations vanishing on the cone.
"""
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from nonlinearities import Nonlinearity, check_hypotheses
from solvers.field import Field
from stability.spectrum import assemble_quadratic_form
from utils.logger import get_logger

logger = get_logger(__name__)

PROBE_FAMILIES = ("polynomial", "solution")


@dataclass
class ProbeReport:
    min_value: float
    worst_trial: int
    slack: float
    passed: bool
    trials: int
    family: str
    cone_vanishing: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "min_value": self.min_value,
            "worst_trial": self.worst_trial,
            "slack": self.slack,
            "pass": self.passed,
            "trials": self.trials,
            "family": self.family,
            "cone_vanishing": self.cone_vanishing,
        }


def _polynomial_trial(rng: np.random.Generator, s: np.ndarray, t: np.ndarray, R: float, degree: int,
                      cone_vanishing: bool) -> np.ndarray:
    """Random polynomial in (s/R, t/R) times a radial cutoff, times (s - t)/R when cone-vanishing."""
    x, y = s / R, t / R
    xi = np.zeros_like(s)
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            xi += rng.standard_normal() * x ** a * y ** b
    radius = rng.uniform(0.3, 1.0)
    xi *= np.clip(1.0 - (x ** 2 + y ** 2) / radius ** 2, 0.0, None) ** 2
    if cone_vanishing:
        xi *= x - y
    return xi


def _solution_trial(rng: np.random.Generator, u: np.ndarray, s: np.ndarray, t: np.ndarray, R: float) -> np.ndarray:
    """u times a Gaussian bump of random centre and width."""
    centre = rng.uniform(0.0, 0.7 * R, 2)
    width = rng.uniform(0.05, 0.5) * R
    return u * np.exp(-((s - centre[0]) ** 2 + (t - centre[1]) ** 2) / width ** 2)


def cone_vanishing_stability_probe(fld: Field, nl: Nonlinearity, trials: int = 200, seed: int = 0,
                                   family: str = "polynomial", cone_vanishing: bool = True,
                                   degree: int = 3) -> ProbeReport:
    """
    Smallest normalized Q(xi) = Q(xi) / sum(mass xi^2) over seeded random trials.

    Passes when the minimum is above -10 h^2.

    Raises:
        ValueError: nl fails H3, trials < 1, or an unknown family
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if family not in PROBE_FAMILIES:
        raise ValueError(f"Unsupported probe family: {family}. Supported families: {', '.join(PROBE_FAMILIES)}")
    if not check_hypotheses(nl).h3.passed:
        raise ValueError("probe requires a nonlinearity satisfying H3 (f concave on (0, M))")

    grid = fld.grid
    form = assemble_quadratic_form(fld, nl, cone_vanishing=cone_vanishing)
    free = form.free
    s, t = grid.s[free], grid.t[free]
    mass = grid.mass[free]
    rng = np.random.default_rng(seed)
    slack = 10.0 * grid.h ** 2

    values = np.empty(trials)
    for trial in range(trials):
        if family == "polynomial":
            xi = _polynomial_trial(rng, s, t, grid.R, degree, cone_vanishing)
        else:
            xi = _solution_trial(rng, fld.values[free], s, t, grid.R)
        norm = float(np.sum(mass * xi ** 2))
        values[trial] = float(xi @ (form.A @ xi)) / norm if norm > 0 else np.inf

    worst = int(np.argmin(values))
    report = ProbeReport(
        min_value=float(values[worst]),
        worst_trial=worst,
        slack=slack,
        passed=bool(values[worst] >= -slack),
        trials=trials,
        family=family,
        cone_vanishing=cone_vanishing,
    )
    logger.info("stability probe", **report.to_dict())
    return report
