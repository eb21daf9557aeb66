"""
Checks for the structural hypotheses on f:

    H1  f is odd
    H2  G >= 0 = G(+-M) on the real line and G > 0 in (-M, M)
    H3  f is concave in (0, M)
"""
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from nonlinearities.base import Nonlinearity


@dataclass(frozen=True)
class HypothesisResult:
    """
    Outcome of one hypothesis check; witness is the worst sample when failing.
    """
    name: str
    passed: bool
    worst_value: float
    witness: Optional[float] = None
    detail: str = ""


@dataclass(frozen=True)
class HypothesisReport:
    h1: HypothesisResult
    h2: HypothesisResult
    h3: HypothesisResult

    @property
    def all_passed(self) -> bool:
        return self.h1.passed and self.h2.passed and self.h3.passed

    def to_dict(self) -> Dict[str, Any]:
        return {"H1": asdict(self.h1), "H2": asdict(self.h2), "H3": asdict(self.h3),
                "all_passed": self.all_passed}


def _check_odd(nl: Nonlinearity, u: np.ndarray, tol: float) -> HypothesisResult:
    residual = np.abs(nl.f(-u) + nl.f(u))
    worst = int(np.argmax(residual))
    passed = bool(residual[worst] <= tol)
    return HypothesisResult(
        name="H1",
        passed=passed,
        worst_value=float(residual[worst]),
        witness=None if passed else float(u[worst]),
        detail="max |f(-u) + f(u)|",
    )


def _check_potential(nl: Nonlinearity, samples: int, tol_exact: float, tol_sampled: float) -> HypothesisResult:
    M = nl.M
    # step M/(samples-1) on [-2M, 2M] so that 0 and +-M are sample points
    u = np.linspace(-2.0 * M, 2.0 * M, 4 * (samples - 1) + 1)
    G = nl.G(u)

    wells = np.array([-M, M])
    well_values = np.abs(nl.G(wells))
    if np.max(well_values) > tol_exact:
        k = int(np.argmax(well_values))
        return HypothesisResult("H2", False, float(well_values[k]), float(wells[k]), "G(+-M) != 0")

    inside = np.abs(u) < M
    if np.any(G[inside] <= 0.0):
        k = int(np.argmin(np.where(inside, G, np.inf)))
        return HypothesisResult("H2", False, float(G[k]), float(u[k]), "G not positive in (-M, M)")

    worst = int(np.argmin(G))
    if G[worst] < -tol_sampled:
        return HypothesisResult("H2", False, float(G[worst]), float(u[worst]), "G negative outside [-M, M]")

    return HypothesisResult("H2", True, float(G[worst]), None, "min G on [-2M, 2M]")


def _check_concave(nl: Nonlinearity, samples: int, tol: float) -> HypothesisResult:
    M = nl.M
    u = np.linspace(0.0, M, samples)[1:-1]
    delta = 1e-3 * M
    lo = np.maximum(u - delta, 0.0)
    hi = np.minimum(u + delta, M)
    # nonuniform three-point second difference near the ends of (0, M)
    dl, dh = u - lo, hi - u
    fpp = 2.0 * (dl * nl.f(hi) - (dl + dh) * nl.f(u) + dh * nl.f(lo)) / (dl * dh * (dl + dh))
    worst = int(np.argmax(fpp))
    passed = bool(fpp[worst] <= tol)
    return HypothesisResult(
        name="H3",
        passed=passed,
        worst_value=float(fpp[worst]),
        witness=None if passed else float(u[worst]),
        detail="max f'' on (0, M)",
    )


def check_hypotheses(nl: Nonlinearity, samples: int = 257, tol_exact: float = 1e-10,
                     tol_sampled: float = 1e-8) -> HypothesisReport:
    """
    Check H1-H3 on sample grids.

    Args:
        nl: Nonlinearity to check
        samples: Samples on [0, M]; the other grids are derived from it
        tol_exact: Tolerance for quantities that must vanish (oddness, G(+-M))
        tol_sampled: Tolerance for sampled inequalities

    Returns:
        HypothesisReport with a witness point for every failed hypothesis
    """
    if samples < 3:
        raise ValueError(f"samples must be >= 3, got {samples}")
    u = np.linspace(0.0, nl.M, samples)
    return HypothesisReport(
        h1=_check_odd(nl, u, tol_exact),
        h2=_check_potential(nl, samples, tol_exact, tol_sampled),
        h3=_check_concave(nl, samples, tol_sampled),
    )
