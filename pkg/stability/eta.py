"""
Radial cutoffs eta and the asymptotic functional

    I(eta) = int_0^inf rho^{2m-2} { eta'(rho)^2 - (m - 1) eta(rho)^2 / rho^2 } d rho

whose sign decides the fate of separable perturbations eta(y/a) u0'(z) as a grows.
"""
from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad

GAUSS_ORDER = 8
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)


@dataclass(frozen=True)
class EtaFamily:
    """
    Lipschitz cutoff supported in [rho1, rho2]:

        c (rho - rho1) / rho1        rho1 <= rho <= 2 rho1
        c                            2 rho1 <= rho <= 1
        rho^-alpha - rho2^-alpha     1 <= rho <= rho2

    with c = 1 - rho2^-alpha, and zero elsewhere.
    """
    rho1: float
    rho2: float
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.rho1 < 0.5:
            raise ValueError(f"rho1 must lie in (0, 1/2), got {self.rho1}")
        if not self.rho2 > 1.0:
            raise ValueError(f"rho2 must be > 1, got {self.rho2}")
        if not 0.5 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (1/2, 1), got {self.alpha}")

    @property
    def plateau(self) -> float:
        return 1.0 - self.rho2 ** -self.alpha

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (self.rho1, 2.0 * self.rho1, 1.0, self.rho2)

    @property
    def support(self) -> Tuple[float, float]:
        return (self.rho1, self.rho2)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        c = self.plateau
        out = np.select(
            [
                (rho >= self.rho1) & (rho <= 2.0 * self.rho1),
                (rho > 2.0 * self.rho1) & (rho <= 1.0),
                (rho > 1.0) & (rho <= self.rho2),
            ],
            [
                c * (rho - self.rho1) / self.rho1,
                c,
                np.power(np.maximum(rho, 1.0), -self.alpha) - self.rho2 ** -self.alpha,
            ],
            default=0.0,
        )
        return float(out) if out.ndim == 0 else out

    def derivative(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.select(
            [
                (rho > self.rho1) & (rho < 2.0 * self.rho1),
                (rho > 1.0) & (rho < self.rho2),
            ],
            [
                np.full_like(rho, self.plateau / self.rho1),
                -self.alpha * np.power(np.maximum(rho, 1.0), -self.alpha - 1.0),
            ],
            default=0.0,
        )
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> Dict[str, float]:
        return {"rho1": self.rho1, "rho2": self.rho2, "alpha": self.alpha}


def eta_eval(fam: EtaFamily, rho) -> float:
    if np.any(np.asarray(rho) < 0):
        raise ValueError("rho must be nonnegative")
    return fam(rho)


@dataclass(frozen=True)
class PiecewiseLinearEta:
    """Continuous piecewise-linear eta through (knots, values), zero at both ends."""
    knots: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if knots.size < 2 or knots.size != values.size:
            raise ValueError("knots and values must have the same length >= 2")
        if knots[0] <= 0 or np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be positive and strictly increasing")
        if values[0] != 0.0 or values[-1] != 0.0:
            raise ValueError("eta must vanish at the first and last knot")
        object.__setattr__(self, "knots", tuple(knots))
        object.__setattr__(self, "values", tuple(values))

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return self.knots

    @property
    def support(self) -> Tuple[float, float]:
        return (self.knots[0], self.knots[-1])

    def __call__(self, rho):
        out = np.interp(rho, self.knots, self.values, left=0.0, right=0.0)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, rho):
        rho = np.asarray(rho, dtype=float)
        knots = np.asarray(self.knots)
        slopes = np.diff(self.values) / np.diff(knots)
        piece = np.clip(np.searchsorted(knots, rho, side="right") - 1, 0, slopes.size - 1)
        out = np.where((rho > knots[0]) & (rho < knots[-1]), slopes[piece], 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DilatedEta:
    """rho -> base(lam * rho)."""
    base: Union[EtaFamily, PiecewiseLinearEta]
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"dilation must be positive, got {self.lam}")

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(b / self.lam for b in self.base.breakpoints)

    @property
    def support(self) -> Tuple[float, float]:
        lo, hi = self.base.support
        return (lo / self.lam, hi / self.lam)

    def __call__(self, rho):
        return self.base(self.lam * np.asarray(rho, dtype=float))

    def derivative(self, rho):
        return self.lam * self.base.derivative(self.lam * np.asarray(rho, dtype=float))


def random_piecewise_linear(rng: np.random.Generator, n_knots: int = 6, lo: float = 0.1,
                            hi: float = 20.0) -> PiecewiseLinearEta:
    """Random nonnegative piecewise-linear eta with log-uniform knots in [lo, hi]."""
    if n_knots < 3:
        raise ValueError(f"n_knots must be >= 3, got {n_knots}")
    knots = np.sort(np.exp(rng.uniform(np.log(lo), np.log(hi), n_knots)))
    knots = np.unique(knots)
    values = rng.uniform(0.0, 1.0, knots.size)
    values[0] = values[-1] = 0.0
    return PiecewiseLinearEta(tuple(knots), tuple(values))


def _power_integral(q: float, a: float, b: float) -> float:
    """int_a^b rho^q d rho."""
    if abs(q + 1.0) < 1e-14:
        return float(np.log(b / a))
    return float((b ** (q + 1.0) - a ** (q + 1.0)) / (q + 1.0))


def _family_functional(fam: EtaFamily, m: int) -> float:
    r1, r2, alpha = fam.rho1, fam.rho2, fam.alpha
    c, b = fam.plateau, fam.rho2 ** -fam.alpha
    k, p = m - 1, 2 * m - 2

    def P(q, lo, hi):
        return _power_integral(q, lo, hi)

    ramp = (c / r1) ** 2 * (
        P(p, r1, 2 * r1)
        - k * (P(p, r1, 2 * r1) - 2 * r1 * P(p - 1, r1, 2 * r1) + r1 ** 2 * P(p - 2, r1, 2 * r1))
    )
    plateau = -k * c ** 2 * P(p - 2, 2 * r1, 1.0)
    decay = ((alpha ** 2 - k) * P(p - 2 - 2 * alpha, 1.0, r2)
             + 2 * k * b * P(p - 2 - alpha, 1.0, r2)
             - k * b ** 2 * P(p - 2, 1.0, r2))
    return float(ramp + plateau + decay)


def _integrand(eta, m: int) -> Callable:
    def density(rho):
        rho = np.asarray(rho, dtype=float)
        return rho ** (2 * m - 2) * (eta.derivative(rho) ** 2 - (m - 1) * eta(rho) ** 2 / rho ** 2)
    return density


def asymptotic_functional(eta, m: int) -> float:
    """
    I(eta) for the weight rho^{2m-2}.

    Closed form for EtaFamily; Gauss-Legendre per linear piece (exact up to
    rounding) for PiecewiseLinearEta and its dilations; adaptive quadrature
    between breakpoints for any other eta exposing __call__, derivative and
    breakpoints.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if isinstance(eta, EtaFamily):
        return _family_functional(eta, m)

    density = _integrand(eta, m)
    points = np.asarray(eta.breakpoints, dtype=float)
    linear = isinstance(eta, PiecewiseLinearEta) or (
        isinstance(eta, DilatedEta) and isinstance(eta.base, PiecewiseLinearEta))
    total = 0.0
    for lo, hi in zip(points[:-1], points[1:]):
        if linear and m <= 4:
            # integrand is a polynomial of degree 2m - 2 on each piece
            half = 0.5 * (hi - lo)
            total += half * float(np.sum(_GL_WEIGHTS * density(half * _GL_NODES + 0.5 * (hi + lo))))
        else:
            value, _ = quad(density, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
            total += value
    return float(total)


def hardy_margin(m: int) -> float:
    """(2m - 3)^2 / 4 - (m - 1); negative exactly when separable perturbations destabilize."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    return (2 * m - 3) ** 2 / 4.0 - (m - 1)


@dataclass
class FamilySearch:
    m: int
    best: EtaFamily
    best_value: float
    evaluated: int
    values: List[Tuple[float, float, float, float]]

    def to_dict(self):
        return {"m": self.m, "best": self.best.to_dict(), "best_value": self.best_value,
                "evaluated": self.evaluated}


def minimize_functional_over_family(m: int, rho1s: Sequence[float], rho2s: Sequence[float],
                                    alphas: Sequence[float]) -> FamilySearch:
    """Grid search of I(eta) over EtaFamily parameters; invalid combinations are skipped."""
    best: Optional[EtaFamily] = None
    best_value = np.inf
    values = []
    for rho1, rho2, alpha in product(rho1s, rho2s, alphas):
        try:
            fam = EtaFamily(rho1, rho2, alpha)
        except ValueError:
            continue
        value = asymptotic_functional(fam, m)
        values.append((rho1, rho2, alpha, value))
        if value < best_value:
            best, best_value = fam, value
    if best is None:
        raise ValueError("no valid EtaFamily in the search grid")
    return FamilySearch(m=m, best=best, best_value=float(best_value), evaluated=len(values), values=values)
