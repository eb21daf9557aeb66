"""
Energy growth E(u, B_R) of the reflected saddle field over a range of radii.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from geometry.grid import build_grid
from nonlinearities import Nonlinearity
from profiles.profile1d import Profile1D, build_profile
from solvers.energy import discrete_energy
from solvers.field import Field, initial_guess, zero_field
from solvers.minimize import SolveReport, SolverOptions, minimize


@dataclass
class GrowthStudy:
    m: int
    h: float
    bc: str
    radii: List[float]
    energies: List[float]
    slope: float
    intercept: float
    solve_report: Optional[SolveReport] = None

    def rows(self):
        return zip(self.radii, self.energies)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "h": self.h,
            "bc": self.bc,
            "radii": self.radii,
            "energies": self.energies,
            "slope": self.slope,
            "intercept": self.intercept,
            "solve": self.solve_report.to_dict() if self.solve_report else None,
        }


def _validate_radii(radii: Sequence[float]) -> List[float]:
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise ValueError(f"energy growth needs at least 3 radii, got {len(radii)}")
    if any(r < 4 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing and >= 4")
    return radii


def _fit(fld: Field, nl: Nonlinearity, radii: List[float]):
    # the odd reflection doubles the sector energy; |grad u|^2 and G(u) are even under it
    energies = [2.0 * discrete_energy(fld, nl, radius=r) for r in radii]
    slope, intercept = np.polyfit(np.log(radii), np.log(energies), 1)
    return energies, float(slope), float(intercept)


def energy_growth_study(nl: Nonlinearity, m: int, radii: Sequence[float], h: float, bc: str = "profile",
                        opts: Optional[SolverOptions] = None, profile: Optional[Profile1D] = None) -> GrowthStudy:
    """
    Solve once on the largest radius and fit log E(u, B_R) against log R.

    The slope approaches 2m - 1 for saddle solutions.
    """
    radii = _validate_radii(radii)
    grid = build_grid(m, radii[-1], h)
    if bc == "profile" and profile is None:
        profile = build_profile(nl)
    fld, report = minimize(initial_guess(grid, nl, bc, profile), nl, opts)
    energies, slope, intercept = _fit(fld, nl, radii)
    return GrowthStudy(m=m, h=h, bc=bc, radii=radii, energies=energies, slope=slope,
                       intercept=intercept, solve_report=report)


def zero_field_growth(nl: Nonlinearity, m: int, radii: Sequence[float], h: float) -> GrowthStudy:
    """Control case u = 0, whose energy G(0)|B_R| grows like R^{2m}."""
    radii = _validate_radii(radii)
    fld = zero_field(build_grid(m, radii[-1], h))
    energies, slope, intercept = _fit(fld, nl, radii)
    return GrowthStudy(m=m, h=h, bc="dirichlet", radii=radii, energies=energies, slope=slope, intercept=intercept)
