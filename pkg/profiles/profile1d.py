"""
The increasing heteroclinic u0 of -u'' = f(u), u0(0) = 0, and the 1-D
solutions u_{b,c}(x) = u0(b.x + c).

The profile is the inverse of the phase map

    phi(sigma) = int_0^sigma dw / sqrt(2 G(w)),

tabulated on a uniform tau-grid. On the positive half we march in the gap
g = M - u0 so that values near the well keep full relative precision: each
step solves int_{g_next}^{g} dw / sqrt(2 G(M - w)) = dtau by Newton's method
with Gauss-Legendre quadrature. The negative half is the odd reflection.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline

from nonlinearities import Nonlinearity, check_hypotheses
from utils.errors import DegenerateWell, InversionFailure, QuadratureSingularity
from utils.logger import get_logger

logger = get_logger(__name__)

GAUSS_ORDER = 12
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)

DEFAULT_TAU_MAX = 20.0
DEFAULT_N_NODES = 4001


@dataclass(frozen=True, eq=False)
class Profile1D:
    """
    Tabulated heteroclinic profile.

    Attributes:
        tau_grid: Uniform grid symmetric about 0
        u0: Profile values, strictly increasing, odd
        u0dot: sqrt(2 G(u0)), positive
        decay_c: Fitted exponential rate of u0dot
        decay_C: Smallest constant with u0dot <= C exp(-c |tau|) on the grid
        gap: M - |u0| at full precision
    """
    tau_grid: np.ndarray
    u0: np.ndarray
    u0dot: np.ndarray
    decay_c: float
    decay_C: float
    gap: np.ndarray
    nl: Nonlinearity = field(repr=False)
    _value: CubicHermiteSpline = field(init=False, repr=False)
    _slope: CubicHermiteSpline = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_value", CubicHermiteSpline(self.tau_grid, self.u0, self.u0dot))
        object.__setattr__(self, "_slope", CubicHermiteSpline(self.tau_grid, self.u0dot, -self.nl.f(self.u0)))

    @property
    def M(self) -> float:
        return self.nl.M

    @property
    def tau_max(self) -> float:
        return float(self.tau_grid[-1])

    @property
    def spacing(self) -> float:
        return float(self.tau_grid[1] - self.tau_grid[0])

    def _evaluate(self, tau, inner, tail):
        tau = np.asarray(tau, dtype=float)
        flat = np.atleast_1d(tau).ravel()
        out = np.empty_like(flat)
        inside = np.abs(flat) <= self.tau_max
        out[inside] = inner(flat[inside])
        if not np.all(inside):
            out[~inside] = tail(flat[~inside])
        out = out.reshape(tau.shape)
        return float(out) if out.ndim == 0 else out

    def _tail_factor(self, tau: np.ndarray) -> np.ndarray:
        return np.exp(-self.decay_c * (np.abs(tau) - self.tau_max))

    def value(self, tau):
        """u0(tau); exponential tails beyond the grid, never reaching +-M."""
        top = np.nextafter(self.M, 0.0)

        def tail(t):
            return np.sign(t) * np.minimum(self.M - self.gap[-1] * self._tail_factor(t), top)

        return self._evaluate(tau, self._value, tail)

    def derivative(self, tau):
        """u0'(tau)."""
        return self._evaluate(tau, self._slope, lambda t: self.u0dot[-1] * self._tail_factor(t))

    def second_derivative(self, tau):
        """u0''(tau) = -f(u0(tau))."""
        def tail(t):
            return -np.sign(t) * self.decay_c * self.u0dot[-1] * self._tail_factor(t)

        return self._evaluate(tau, lambda t: -self.nl.f(self._value(t)), tail)

    def hamiltonian_residual(self) -> float:
        """max |u0dot^2 / 2 - G(u0)| over the nodes."""
        return float(np.max(np.abs(0.5 * self.u0dot ** 2 - self.nl.G(self.u0))))

    def ode_residual(self) -> float:
        """max |u0'' + f(u0)| with fourth-order central differences."""
        return float(np.max(np.abs(_second_difference(self.u0, self.spacing) + self.nl.f(self.u0[2:-2]))))

    def zero_mode_residual(self) -> float:
        """max |-psi'' - f'(u0) psi| for psi = u0dot, fourth-order differences."""
        psi = self.u0dot
        residual = -_second_difference(psi, self.spacing) - self.nl.fprime(self.u0[2:-2]) * psi[2:-2]
        return float(np.max(np.abs(residual)))

    def summary(self) -> Dict[str, Any]:
        return {
            "nonlinearity": self.nl.describe(),
            "tau_max": self.tau_max,
            "n_nodes": int(self.tau_grid.size),
            "decay_c": self.decay_c,
            "decay_C": self.decay_C,
            "line_energy": profile_energy_line(self),
            "max_hamiltonian_residual": self.hamiltonian_residual(),
            "ode_residual": self.ode_residual(),
            "zero_mode_residual": self.zero_mode_residual(),
        }

    def rows(self):
        return zip(self.tau_grid, self.u0, self.u0dot)


def _second_difference(values: np.ndarray, spacing: float) -> np.ndarray:
    return (-values[4:] + 16.0 * values[3:-1] - 30.0 * values[2:-2]
            + 16.0 * values[1:-3] - values[:-4]) / (12.0 * spacing ** 2)


def _phase_increment(nl: Nonlinearity, lo: float, hi: float) -> float:
    """int_lo^hi dw / sqrt(2 G(M - w)) for 0 < lo < hi <= M."""
    half = 0.5 * (hi - lo)
    w = half * _GL_NODES + 0.5 * (hi + lo)
    potential = nl.G_near_well(w)
    if np.any(potential <= 0.0):
        bad = float(nl.M - w[np.argmin(potential)])
        raise QuadratureSingularity(f"G vanishes inside (-M, M) near u = {bad:.6g}")
    return half * float(np.sum(_GL_WEIGHTS / np.sqrt(2.0 * potential)))


def _step_gap(nl: Nonlinearity, gap: float, dtau: float) -> float:
    """Gap after advancing the profile by dtau from the given gap."""
    speed = float(np.sqrt(2.0 * nl.G_near_well(gap)))
    guess = gap - dtau * speed + 0.5 * dtau ** 2 * float(nl.f(nl.M - gap))
    if not 0.0 < guess < gap:
        guess = gap * np.exp(-dtau * speed / gap)

    x = guess
    for _ in range(60):
        residual = _phase_increment(nl, x, gap) - dtau
        x_new = x + residual * float(np.sqrt(2.0 * nl.G_near_well(x)))
        if x_new <= 0.0:
            x_new = 0.5 * x
        elif x_new >= gap:
            x_new = 0.5 * (x + gap)
        if abs(x_new - x) <= 4e-16 * x:
            return x_new
        x = x_new

    if abs(_phase_increment(nl, x, gap) - dtau) > 1e-12 * dtau:
        raise InversionFailure(f"phase map inversion did not converge at gap {gap:.6g}")
    return x


def build_profile(nl: Nonlinearity, tau_max: float = DEFAULT_TAU_MAX, n_nodes: int = DEFAULT_N_NODES,
                  check: bool = True) -> Profile1D:
    """
    Tabulate u0 on a uniform grid over [-tau_max, tau_max].

    Args:
        nl: Nonlinearity satisfying H1 and H2
        tau_max: Half-width of the grid, >= 5
        n_nodes: Number of nodes, >= 65; even counts are bumped to keep tau = 0 a node
        check: Run the hypothesis checks first

    Raises:
        QuadratureSingularity: G has a zero inside (-M, M)
        InversionFailure: The phase map could not be inverted monotonically
        DegenerateWell: G''(M) <= 0 or f(M) != 0
    """
    if tau_max < 5:
        raise ValueError(f"tau_max must be >= 5, got {tau_max}")
    if n_nodes < 65:
        raise ValueError(f"n_nodes must be >= 65, got {n_nodes}")

    if check:
        report = check_hypotheses(nl)
        if not report.h1.passed:
            raise ValueError(f"nonlinearity is not odd (witness u = {report.h1.witness})")
        if not report.h2.passed:
            witness = report.h2.witness
            if witness is not None and abs(witness) < nl.M:
                raise QuadratureSingularity(f"G has an interior zero or sign change near u = {witness:.6g}")
            raise ValueError(f"hypothesis H2 fails: {report.h2.detail} (witness u = {witness})")

    if abs(float(nl.f(nl.M))) > 1e-10 or not nl.well_curvature() > 0.0:
        raise DegenerateWell(f"well at M = {nl.M} is degenerate (G''(M) = {nl.well_curvature():.6g})")

    if n_nodes % 2 == 0:
        logger.debug("bumping n_nodes to an odd count", n_nodes=n_nodes + 1)
        n_nodes += 1
    half = (n_nodes - 1) // 2
    dtau = tau_max / half

    gaps = np.empty(half + 1)
    gaps[0] = nl.M
    for j in range(half):
        gaps[j + 1] = _step_gap(nl, gaps[j], dtau)

    if not np.all(np.diff(gaps) < 0.0):
        raise InversionFailure("phase map is not strictly monotone on the grid")
    speed = np.sqrt(2.0 * nl.G_near_well(gaps))
    if not np.all(speed > 0.0):
        raise InversionFailure("profile derivative underflows; reduce tau_max")

    top = np.nextafter(nl.M, 0.0)
    values = np.minimum(nl.M - gaps, top)
    values[0] = 0.0

    tau = dtau * np.arange(-half, half + 1, dtype=float)
    u0 = np.concatenate([-values[:0:-1], values])
    u0dot = np.concatenate([speed[:0:-1], speed])
    gap = np.concatenate([gaps[:0:-1], gaps])

    outer = tau >= 0.5 * tau_max
    slope, _ = np.polyfit(tau[outer], np.log(u0dot[outer]), 1)
    decay_c = -float(slope)
    if not decay_c > 0.0:
        raise DegenerateWell(f"fitted decay rate is not positive ({decay_c:.6g})")
    decay_C = float(np.max(u0dot * np.exp(decay_c * np.abs(tau)))) * (1.0 + 1e-12)

    return Profile1D(tau_grid=tau, u0=u0, u0dot=u0dot, decay_c=decay_c, decay_C=decay_C, gap=gap, nl=nl)


def profile_energy_line(p: Profile1D) -> float:
    """
    int (u0dot^2 / 2 + G(u0)) dtau over the grid plus the exponential tails.
    """
    density = 0.5 * p.u0dot ** 2 + p.nl.G_near_well(p.gap)
    tails = p.u0dot[0] ** 2 / (2.0 * p.decay_c) + p.u0dot[-1] ** 2 / (2.0 * p.decay_c)
    return float(simpson(density, x=p.tau_grid)) + float(tails)


def one_d_solution(p: Profile1D, b, c: float, x):
    """
    u_{b,c}(x) = u0(b.x + c).

    Args:
        p: Profile
        b: Unit vector in R^n
        c: Shift
        x: Point in R^n, or an array of points with shape (k, n)
    """
    b = np.asarray(b, dtype=float)
    if abs(np.linalg.norm(b) - 1.0) > 1e-12:
        raise ValueError(f"b must be a unit vector, |b| = {np.linalg.norm(b)}")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != b.size:
        raise ValueError(f"x has dimension {x.shape[-1]}, b has dimension {b.size}")
    return p.value(x @ b + c)


def profile_sector_values(p: Profile1D, s, t, scale: Optional[float] = None):
    """clamp(u0((s - t) / sqrt 2), 0, M), optionally multiplied by scale before clamping."""
    values = p.value((np.asarray(s, dtype=float) - np.asarray(t, dtype=float)) / np.sqrt(2.0))
    if scale is not None:
        values = scale * values
    return np.clip(values, 0.0, p.M)
