"""
Scaling sweep of Q_{u0}(eta(y/a) u0'(z)) / a^{2m-3} as a grows.

The limit is (int u0'^2) * I(eta), with I the asymptotic functional.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from nonlinearities import Nonlinearity
from profiles.profile1d import Profile1D, profile_energy_line
from stability.eta import asymptotic_functional, hardy_margin
from stability.forms import (
    QuadratureOptions,
    ScaledProfileTestFunction,
    quadratic_form_ibp,
    quadratic_form_yz,
)
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class SweepPoint:
    a: float
    value: float
    scaled: float
    boundary_correction: float
    ibp_value: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "a": self.a,
            "value": self.value,
            "scaled": self.scaled,
            "boundary_correction": self.boundary_correction,
            "ibp_value": self.ibp_value,
        }


@dataclass
class SweepReport:
    m: int
    eta: Dict[str, Any]
    points: List[SweepPoint]
    line_energy: float
    functional: float
    hardy_margin: Optional[float]

    @property
    def limit(self) -> float:
        return self.line_energy * self.functional

    @property
    def final_scaled(self) -> float:
        return self.points[-1].scaled

    def rows(self):
        return ((p.a, p.value, p.scaled, p.boundary_correction) for p in self.points)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "eta": self.eta,
            "points": [p.to_dict() for p in self.points],
            "line_energy": self.line_energy,
            "asymptotic_functional": self.functional,
            "limit": self.limit,
            "hardy_margin": self.hardy_margin,
        }


def instability_sweep(p: Profile1D, nl: Nonlinearity, m: int, fam, a_values: Sequence[float],
                      opts: Optional[QuadratureOptions] = None) -> SweepReport:
    """
    Evaluate the separable form for each scale a.

    boundary_correction is the scaled boundary term of the integrated-by-parts
    form, which decays like a u0'(a rho1)^2.

    Raises:
        ValueError: a_values not increasing or some a < 1
    """
    a_values = [float(a) for a in a_values]
    if not a_values or any(a < 1.0 for a in a_values) or any(b <= a for a, b in zip(a_values, a_values[1:])):
        raise ValueError("a_values must be increasing and >= 1")

    points = []
    for a in a_values:
        xi = ScaledProfileTestFunction(fam, p, a)
        direct = quadratic_form_yz(p, xi, nl, m, opts)
        ibp = quadratic_form_ibp(p, xi, nl, m, opts)
        points.append(SweepPoint(
            a=a,
            value=direct.value,
            scaled=direct.scaled,
            boundary_correction=ibp.boundary_term / ibp.a_scaling,
            ibp_value=ibp.value,
        ))
        logger.debug("sweep point", a=a, scaled=direct.scaled)

    report = SweepReport(
        m=m,
        eta=fam.to_dict() if hasattr(fam, "to_dict") else {"breakpoints": list(fam.breakpoints)},
        points=points,
        line_energy=profile_energy_line(p),
        functional=asymptotic_functional(fam, m),
        hardy_margin=hardy_margin(m) if m >= 2 else None,
    )
    logger.info("instability sweep", m=m, final_scaled=report.final_scaled, limit=report.limit)
    return report


def separable_contrast(p: Profile1D, nl: Nonlinearity, m: int, fam, a: float) -> float:
    """Q_{u0} of the separable test function, which is free on the cone; negative for large a when I(eta) < 0."""
    return quadratic_form_yz(p, ScaledProfileTestFunction(fam, p, a), nl, m).value
