"""
Second variation of the energy in the wedge coordinates y = (s + t)/sqrt 2,
z = (s - t)/sqrt 2:

    Q_v(xi) = int_{y > 0} int_{|z| < y} (y^2 - z^2)^{m-1} { xi_y^2 + xi_z^2 - f'(v) xi^2 } dz dy

The wedge integral equals c_m times the integral over R^{2m}, with
c_m = 2^{m-1} / a_m and a_m = |S^{m-1}|^2.

For v = u0(z) and separable xi = phi(y) u0'(z) the z-integrals are moments of
profile functions, computed once per profile with Gauss-Legendre rules on the
tau-cells of the profile grid. The zero-mode cancellation between xi_z^2 and
f'(u0) xi^2 is then resolved to rounding, which the composite 2-D rule used
for every other source cannot do at large scales.
"""
from dataclasses import dataclass
from math import comb
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from geometry.coordinates import st_from_yz
from geometry.grid import energy_constant
from nonlinearities import Nonlinearity
from profiles.profile1d import Profile1D
from solvers.field import SaddleField
from utils.errors import UnsupportedDomain

SQRT2 = np.sqrt(2.0)
_CHUNK = 64


@dataclass(frozen=True)
class QuadratureOptions:
    """
    Attributes:
        order: Gauss-Legendre order per y panel and per profile tau-cell
        y_ratio: Largest hi/lo ratio of a y panel
        y_width: Largest width of a y panel below z_max
        z_max: Truncation of |z|; defaults to the profile half-width
        z_panels: z panels per y node for the composite rule
        z_order: Gauss-Legendre order per z panel
    """
    order: int = 10
    y_ratio: float = 1.25
    y_width: float = 0.5
    z_max: Optional[float] = None
    z_panels: int = 64
    z_order: int = 8


@dataclass(frozen=True)
class QuadraticFormReport:
    value: float
    gradient_term: float
    potential_term: float
    boundary_term: float
    a_scaling: float
    c_m: float
    norm_sq: float
    truncation_bound: float = 0.0
    method: str = "direct"

    @property
    def scaled(self) -> float:
        return self.value / self.a_scaling

    @property
    def full_space_value(self) -> float:
        return self.value / self.c_m

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "gradient_term": self.gradient_term,
            "potential_term": self.potential_term,
            "boundary_term": self.boundary_term,
            "a_scaling": self.a_scaling,
            "scaled": self.scaled,
            "c_m": self.c_m,
            "full_space_value": self.full_space_value,
            "norm_sq": self.norm_sq,
            "truncation_bound": self.truncation_bound,
            "method": self.method,
        }


def wedge_constant(m: int) -> float:
    """c_m = 2^{m-1} / a_m."""
    return 2.0 ** (m - 1) / energy_constant(m)


class ScaledProfileTestFunction:
    """xi_a(y, z) = eta(y / a) u0'(z)."""

    def __init__(self, eta, profile: Profile1D, a: float = 1.0):
        if not a > 0:
            raise ValueError(f"scale a must be positive, got {a}")
        self.eta = eta
        self.profile = profile
        self.a = float(a)

    @property
    def support_y(self) -> Tuple[float, float]:
        lo, hi = self.eta.support
        return (self.a * lo, self.a * hi)

    @property
    def breakpoints_y(self) -> Tuple[float, ...]:
        return tuple(self.a * b for b in self.eta.breakpoints)

    def phi(self, y):
        return self.eta(np.asarray(y) / self.a)

    def dphi(self, y):
        return self.eta.derivative(np.asarray(y) / self.a) / self.a

    def value(self, y, z):
        return self.phi(y) * self.profile.derivative(z)

    def dy(self, y, z):
        return self.dphi(y) * self.profile.derivative(z)

    def dz(self, y, z):
        return self.phi(y) * self.profile.second_derivative(z)


class CallableTestFunction:
    """xi given by callables for the value and both partial derivatives."""

    def __init__(self, value: Callable, dy: Callable, dz: Callable, support_y: Tuple[float, float],
                 breakpoints_y: Sequence[float] = ()):
        lo, hi = support_y
        if not 0 <= lo < hi:
            raise ValueError(f"support_y must satisfy 0 <= lo < hi, got {support_y}")
        self.value, self.dy, self.dz = value, dy, dz
        self.support_y = (float(lo), float(hi))
        self.breakpoints_y = tuple(sorted({float(lo), float(hi), *(float(b) for b in breakpoints_y if lo < b < hi)}))


WedgeFunction = Union[ScaledProfileTestFunction, CallableTestFunction]


class ProfileMoments:
    """
    Cumulative moments int_0^Z z^{2k} g(z) dz, k = 0..kmax, of the even functions

        psi2   u0'(z)^2
        dpsi2  u0''(z)^2
        fpsi2  f'(u0(z)) u0'(z)^2
    """
    NAMES = ("psi2", "dpsi2", "fpsi2")

    def __init__(self, p: Profile1D, nl: Nonlinearity, z_max: float, kmax: int, order: int = 10):
        if not 0 < z_max <= p.tau_max:
            raise ValueError(f"z_max must lie in (0, {p.tau_max}], got {z_max}")
        self.p, self.nl, self.kmax = p, nl, kmax
        self.z_max = float(z_max)
        self._nodes, self._weights = np.polynomial.legendre.leggauss(order)

        half = p.tau_grid[p.tau_grid.size // 2:]
        edges = half[half < self.z_max * (1 - 1e-12)]
        self.edges = np.append(edges, self.z_max)
        lo, hi = self.edges[:-1], self.edges[1:]
        cells = self._cell_moments(lo, hi)
        self._cumulative = {
            name: np.concatenate([np.zeros((kmax + 1, 1)), np.cumsum(cells[name], axis=1)], axis=1)
            for name in self.NAMES
        }

    def functions(self, z) -> Dict[str, np.ndarray]:
        psi = self.p.derivative(z)
        dpsi = self.p.second_derivative(z)
        return {
            "psi2": psi ** 2,
            "dpsi2": dpsi ** 2,
            "fpsi2": self.nl.fprime(self.p.value(z)) * psi ** 2,
        }

    def _cell_moments(self, lo: np.ndarray, hi: np.ndarray) -> Dict[str, np.ndarray]:
        """Moments over [lo_i, hi_i], shape (kmax + 1, len(lo))."""
        half = 0.5 * (hi - lo)[:, None]
        z = half * self._nodes + 0.5 * (hi + lo)[:, None]
        w = half * self._weights
        values = self.functions(z)
        powers = [z ** (2 * k) for k in range(self.kmax + 1)]
        return {name: np.stack([np.sum(w * pw * values[name], axis=1) for pw in powers])
                for name in self.NAMES}

    def __call__(self, Z) -> Dict[str, np.ndarray]:
        """Moments up to each Z in [0, z_max], shape (kmax + 1, len(Z))."""
        Z = np.clip(np.asarray(Z, dtype=float), 0.0, self.z_max)
        idx = np.clip(np.searchsorted(self.edges, Z, side="right") - 1, 0, self.edges.size - 2)
        start = self.edges[idx]
        partial = self._cell_moments(start, Z)
        return {name: self._cumulative[name][:, idx] + partial[name] for name in self.NAMES}


def _y_panels(breakpoints: Sequence[float], opts: QuadratureOptions, z_max: float,
              width: Optional[float] = None) -> np.ndarray:
    """Panel edges refining the breakpoints geometrically, and uniformly below z_max."""
    cuts = sorted({float(b) for b in breakpoints})
    if cuts[0] < z_max < cuts[-1]:
        cuts = sorted(set(cuts) | {z_max})
    edges = [cuts[0]]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        x = lo
        while x < hi:
            if width is not None:
                cap = width
            else:
                cap = opts.y_width if x < z_max else np.inf
            step = min(cap, x * (opts.y_ratio - 1.0)) if x > 0 else cap
            x = x + step
            if not np.isfinite(x) or hi - x < 1e-9 * (hi - lo):
                x = hi
            edges.append(x)
    return np.asarray(edges)


def _panel_nodes(edges: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    return (half * nodes + 0.5 * (hi + lo)).ravel(), (half * weights).ravel()


def _check_support(xi: WedgeFunction, y_max: Optional[float]):
    lo, hi = xi.support_y
    if y_max is not None and hi > y_max * (1 + 1e-12):
        raise UnsupportedDomain(f"test function support reaches y = {hi:.6g} beyond y_max = {y_max:.6g}")


def _field_y_max(fld: SaddleField, z_max: float) -> float:
    """Largest y with the whole z-range |z| <= min(y, z_max) inside the disk."""
    if fld.R / SQRT2 <= z_max:
        return fld.R / SQRT2
    return float(np.sqrt(fld.R ** 2 - z_max ** 2))


def _weight_expansion(m_minus_1: int, y: np.ndarray, mom: np.ndarray, shift: int = 0) -> np.ndarray:
    """2 int_0^Z z^{2 shift} (y^2 - z^2)^{m_minus_1} g dz from the moments of g."""
    total = np.zeros_like(y)
    for k in range(m_minus_1 + 1):
        total += comb(m_minus_1, k) * (-1) ** k * y ** (2 * (m_minus_1 - k)) * mom[k + shift]
    return 2.0 * total


def _separable(p: Profile1D, xi: ScaledProfileTestFunction, nl: Nonlinearity, m: int,
               opts: QuadratureOptions, z_max: float):
    """Shared y-quadrature data of the separable evaluations."""
    edges = _y_panels(xi.breakpoints_y, opts, z_max)
    y, wy = _panel_nodes(edges, opts.order)
    Z = np.minimum(y, z_max)
    moments = ProfileMoments(p, nl, z_max, kmax=m - 1, order=opts.order)(Z)
    return y, wy, Z, xi.phi(y), xi.dphi(y), moments


def _truncation_bound(p: Profile1D, nl: Nonlinearity, m: int, y, wy, phi, dphi, z_max: float) -> float:
    """Bound on the part of the integral with |z| > z_max from the exponential tails of u0'."""
    beyond = y > z_max
    if not np.any(beyond):
        return 0.0
    c, C = p.decay_c, p.decay_C
    tail = C ** 2 * np.exp(-2 * c * z_max) / c
    scale = 1.0 + c ** 2 + abs(nl.linearization_bound()) + max(nl.potential_curvature_bound(), 0.0)
    density = y[beyond] ** (2 * m - 2) * (dphi[beyond] ** 2 + scale * phi[beyond] ** 2)
    return float(np.sum(wy[beyond] * density) * tail)


def _separable_direct(p, xi, nl, m, opts, z_max, a_scaling) -> QuadraticFormReport:
    y, wy, Z, phi, dphi, mom = _separable(p, xi, nl, m, opts, z_max)
    w_psi2 = _weight_expansion(m - 1, y, mom["psi2"])
    w_dpsi2 = _weight_expansion(m - 1, y, mom["dpsi2"])
    w_fpsi2 = _weight_expansion(m - 1, y, mom["fpsi2"])
    gradient = float(np.sum(wy * (dphi ** 2 * w_psi2 + phi ** 2 * w_dpsi2)))
    potential = -float(np.sum(wy * phi ** 2 * w_fpsi2))
    return QuadraticFormReport(
        value=gradient + potential,
        gradient_term=gradient,
        potential_term=potential,
        boundary_term=0.0,
        a_scaling=a_scaling,
        c_m=wedge_constant(m),
        norm_sq=float(np.sum(wy * phi ** 2 * w_psi2)),
        truncation_bound=_truncation_bound(p, nl, m, y, wy, phi, dphi, z_max),
        method="separable",
    )


def _composite(source, xi: WedgeFunction, nl: Nonlinearity, m: int, opts: QuadratureOptions,
               z_max: float, a_scaling: float) -> QuadraticFormReport:
    if isinstance(source, SaddleField):
        edges = _y_panels(xi.breakpoints_y, opts, z_max, width=source.h)
        order = 4
        n_panels = max(8, int(np.ceil(2 * min(xi.support_y[1], z_max) / source.h)))

        def potential_of(y, z):
            s, t = st_from_yz(y, z)
            return nl.fprime(source.value_at(s, t))
    else:
        edges = _y_panels(xi.breakpoints_y, opts, z_max)
        order = opts.order
        n_panels = opts.z_panels

        def potential_of(y, z):
            return nl.fprime(source.value(z))

    y, wy = _panel_nodes(edges, order)
    # reference rule on [-1, 1], scaled to [-Z(y), Z(y)]
    ref, ref_w = _panel_nodes(np.linspace(-1.0, 1.0, n_panels + 1), opts.z_order)
    gradient = potential = norm_sq = 0.0
    for start in range(0, y.size, _CHUNK):
        yc, wc = y[start:start + _CHUNK, None], wy[start:start + _CHUNK, None]
        Z = np.minimum(yc, z_max)
        z = Z * ref
        w = wc * Z * ref_w
        W = (yc ** 2 - z ** 2) ** (m - 1)
        yy = np.broadcast_to(yc, z.shape)
        value = xi.value(yy, z)
        gradient += float(np.sum(w * W * (xi.dy(yy, z) ** 2 + xi.dz(yy, z) ** 2)))
        potential -= float(np.sum(w * W * potential_of(yy, z) * value ** 2))
        norm_sq += float(np.sum(w * W * value ** 2))
    return QuadraticFormReport(
        value=gradient + potential,
        gradient_term=gradient,
        potential_term=potential,
        boundary_term=0.0,
        a_scaling=a_scaling,
        c_m=wedge_constant(m),
        norm_sq=norm_sq,
        method="composite",
    )


def _resolve(source, xi: WedgeFunction, m: int, opts: QuadratureOptions, y_max: Optional[float]):
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if isinstance(source, Profile1D):
        z_max = source.tau_max if opts.z_max is None else min(opts.z_max, source.tau_max)
    elif isinstance(source, SaddleField):
        if source.m != m:
            raise ValueError(f"field has m = {source.m}, form requested for m = {m}")
        z_max = opts.z_max or source.R
        y_max = _field_y_max(source, z_max) if y_max is None else min(y_max, _field_y_max(source, z_max))
    else:
        raise ValueError(f"Unsupported source: {type(source).__name__}. Supported sources: Profile1D, SaddleField")
    _check_support(xi, y_max)
    a_scaling = xi.a ** (2 * m - 3) if isinstance(xi, ScaledProfileTestFunction) else 1.0
    return z_max, a_scaling


def quadratic_form_yz(source: Union[Profile1D, SaddleField], xi: WedgeFunction, nl: Nonlinearity, m: int,
                      opts: Optional[QuadratureOptions] = None, y_max: Optional[float] = None) -> QuadraticFormReport:
    """
    Q_v(xi) over the wedge for v = u0(z) (a Profile1D) or a reflected saddle field.

    Raises:
        UnsupportedDomain: xi is supported beyond y_max, or beyond the disk of a field source
    """
    opts = opts or QuadratureOptions()
    z_max, a_scaling = _resolve(source, xi, m, opts, y_max)
    if isinstance(source, Profile1D) and isinstance(xi, ScaledProfileTestFunction) and xi.profile is source:
        return _separable_direct(source, xi, nl, m, opts, z_max, a_scaling)
    return _composite(source, xi, nl, m, opts, z_max, a_scaling)


def quadratic_form_ibp(p: Profile1D, xi: ScaledProfileTestFunction, nl: Nonlinearity, m: int,
                       opts: Optional[QuadratureOptions] = None) -> QuadraticFormReport:
    """
    Q_{u0}(phi(y) u0'(z)) after integrating the z-part by parts against the zero mode:

        int phi'^2 W psi^2
        - (m - 1) int phi^2 (y^2 - z^2)^{m-2} psi^2
        + 2 (m - 1)(m - 2) int phi^2 z^2 (y^2 - z^2)^{m-3} psi^2
        + int phi^2 [2 W psi psi' - W_z psi^2] at z = min(y, z_max)
    """
    opts = opts or QuadratureOptions()
    z_max, a_scaling = _resolve(p, xi, m, opts, None)
    y, wy, Z, phi, dphi, mom = _separable(p, xi, nl, m, opts, z_max)
    psi2 = mom["psi2"]

    gradient = float(np.sum(wy * dphi ** 2 * _weight_expansion(m - 1, y, psi2)))
    potential = 0.0
    if m >= 2:
        potential -= (m - 1) * float(np.sum(wy * phi ** 2 * _weight_expansion(m - 2, y, psi2)))
    if m >= 3:
        potential += 2 * (m - 1) * (m - 2) * float(np.sum(wy * phi ** 2 * _weight_expansion(m - 3, y, psi2, shift=1)))

    psi = p.derivative(Z)
    dpsi = p.second_derivative(Z)
    W = (y ** 2 - Z ** 2) ** (m - 1)
    W_z = -2.0 * (m - 1) * Z * np.power(y ** 2 - Z ** 2, max(m - 2, 0)) if m >= 2 else np.zeros_like(y)
    boundary = float(np.sum(wy * phi ** 2 * (2.0 * W * psi * dpsi - W_z * psi ** 2)))

    return QuadraticFormReport(
        value=gradient + potential + boundary,
        gradient_term=gradient,
        potential_term=potential,
        boundary_term=boundary,
        a_scaling=a_scaling,
        c_m=wedge_constant(m),
        norm_sq=float(np.sum(wy * phi ** 2 * _weight_expansion(m - 1, y, psi2))),
        truncation_bound=_truncation_bound(p, nl, m, y, wy, phi, dphi, z_max),
        method="ibp",
    )
