"""
A posteriori checks of computed fields:

    modica          |grad u|^2 / 2 <= G(u)
    pointwise_bound |u(s, t)| <= u0(|s - t| / sqrt 2)
    supersolution   u0((s - t) / sqrt 2) is a supersolution in {s > t}
    strict_bound    |u| < M at interior nodes

A positive worst_violation means the inequality is violated by that much.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from geometry.grid import NodeKind, TriangleGrid
from nonlinearities import Nonlinearity
from profiles.profile1d import Profile1D
from solvers.field import Field, SaddleField

SQRT2 = np.sqrt(2.0)
DEFAULT_ARC_MARGIN = 4.0


@dataclass(frozen=True)
class EstimateReport:
    name: str
    worst_violation: float
    worst_node: Tuple[float, float]
    tolerance_used: float
    passed: bool
    nodes_checked: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "worst_violation": self.worst_violation,
            "worst_node": list(self.worst_node),
            "tolerance_used": self.tolerance_used,
            "pass": self.passed,
            "nodes_checked": self.nodes_checked,
        }


def discretization_slack(h: float, scale: float = 1.0) -> float:
    """10 h^2 times the local curvature scale (never below 1)."""
    return 10.0 * h ** 2 * max(1.0, scale)


def curvature_scale(fld: SaddleField) -> float:
    """Largest second difference of u over lattice points whose stencil lies in the disk."""
    v = fld.values
    inner = fld.inside[1:-1, 1:-1] & fld.inside[2:, 1:-1] & fld.inside[1:-1, 2:]
    d_ss = np.abs(v[2:, 1:-1] - 2 * v[1:-1, 1:-1] + v[:-2, 1:-1])
    d_tt = np.abs(v[1:-1, 2:] - 2 * v[1:-1, 1:-1] + v[1:-1, :-2])
    curvature = np.maximum(d_ss, d_tt)[inner] / fld.h ** 2
    return float(np.max(curvature, initial=0.0))


def _worst(name: str, violation: np.ndarray, s: np.ndarray, t: np.ndarray, tolerance: float) -> EstimateReport:
    if violation.size == 0:
        return EstimateReport(name, float("-inf"), (float("nan"), float("nan")), tolerance, True, 0)
    k = int(np.argmax(violation))
    worst = float(violation[k])
    return EstimateReport(
        name=name,
        worst_violation=worst,
        worst_node=(float(s[k]), float(t[k])),
        tolerance_used=float(tolerance),
        passed=bool(worst <= tolerance),
        nodes_checked=int(violation.size),
    )


def _stencil_nodes(fld: SaddleField, margin: float) -> np.ndarray:
    """Lattice points away from the index boundary with all four neighbours in the disk."""
    inside = fld.inside
    mask = np.zeros_like(inside)
    mask[1:-1, 1:-1] = (inside[1:-1, 1:-1] & inside[2:, 1:-1] & inside[:-2, 1:-1]
                        & inside[1:-1, 2:] & inside[1:-1, :-2])
    S, T = fld.coordinates()
    return mask & (np.hypot(S, T) <= fld.R - margin)


def modica_check(fld: SaddleField, nl: Nonlinearity, tolerance: Optional[float] = None,
                 margin: Optional[float] = None) -> EstimateReport:
    """
    worst of |grad u|^2 / 2 - G(u).

    Exact gradients are used when the field carries them; otherwise central
    differences on points whose stencil lies in the disk and at least margin
    away from the outer arc.
    """
    S, T = fld.coordinates()
    if fld.grad_sq is not None:
        nodes = fld.inside & (np.hypot(S, T) <= fld.R - (margin or 0.0))
        grad_sq = fld.grad_sq
    else:
        nodes = _stencil_nodes(fld, DEFAULT_ARC_MARGIN if margin is None else margin)
        v, h = fld.values, fld.h
        grad_sq = np.zeros_like(v)
        grad_sq[1:-1, 1:-1] = (((v[2:, 1:-1] - v[:-2, 1:-1]) / (2 * h)) ** 2
                               + ((v[1:-1, 2:] - v[1:-1, :-2]) / (2 * h)) ** 2)
    if tolerance is None:
        tolerance = discretization_slack(fld.h, curvature_scale(fld))
    violation = 0.5 * grad_sq[nodes] - nl.G(fld.values[nodes])
    return _worst("modica", violation, S[nodes], T[nodes], tolerance)


def pointwise_bound_check(fld: SaddleField, p: Profile1D, tolerance: Optional[float] = None) -> EstimateReport:
    """worst of |u(s, t)| - u0(|s - t| / sqrt 2) over all lattice points in the disk."""
    S, T = fld.coordinates()
    nodes = fld.inside
    bound = p.value(np.abs(S[nodes] - T[nodes]) / SQRT2)
    violation = np.abs(fld.values[nodes]) - bound
    if tolerance is None:
        tolerance = discretization_slack(fld.h, curvature_scale(fld))
    return _worst("pointwise_bound", violation, S[nodes], T[nodes], tolerance)


def supersolution_residual(p: Profile1D, nl: Nonlinearity, m: int, s, t):
    """
    -Delta v - f(v) for v = u0((s - t) / sqrt 2), through the reduced Laplacian
    v_ss + v_tt + (m - 1)(v_s / s + v_t / t).
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    z = (s - t) / SQRT2
    first = p.derivative(z)
    second = p.second_derivative(z)
    v_s, v_t = first / SQRT2, -first / SQRT2
    v_ss = v_tt = 0.5 * second
    laplacian = v_ss + v_tt + (m - 1) * (v_s / s + v_t / t)
    return -laplacian - nl.f(p.value(z))


def supersolution_closed_form(p: Profile1D, m: int, s, t):
    """(m - 1)(u0'(z) / sqrt 2)(1/t - 1/s)."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    return (m - 1) * (p.derivative((s - t) / SQRT2) / SQRT2) * (1.0 / t - 1.0 / s)


def supersolution_check(p: Profile1D, nl: Nonlinearity, grid: TriangleGrid,
                        tolerance: float = 1e-12) -> EstimateReport:
    """worst of -r over interior nodes with t > 0; r >= 0 means supersolution."""
    if grid.m < 1:
        raise ValueError(f"m must be >= 1, got {grid.m}")
    nodes = (grid.kind == NodeKind.INTERIOR) & (grid.j > 0)
    s, t = grid.s[nodes], grid.t[nodes]
    residual = supersolution_residual(p, nl, grid.m, s, t)
    return _worst("supersolution", -residual, s, t, tolerance)


def strict_bound_check(fld: Field, nl: Nonlinearity, margin: float = 1e-6) -> EstimateReport:
    """worst of |u| - (M - margin) over interior nodes."""
    grid = fld.grid
    nodes = grid.kind == NodeKind.INTERIOR
    violation = np.abs(fld.values[nodes]) - (nl.M - margin)
    return _worst("strict_bound", violation, grid.s[nodes], grid.t[nodes], 0.0)


def profile_field(p: Profile1D, m: int, R: float, h: float, scale: float = 1.0) -> SaddleField:
    """scale * u0((s - t) / sqrt 2) on the quarter-plane square, with exact |grad|^2."""
    N = int(np.floor(R / h + 1e-9))
    axis = h * np.arange(N + 1)
    S, T = np.meshgrid(axis, axis, indexing="ij")
    inside = np.hypot(S, T) <= R * (1 + 1e-12)
    z = (S - T) / SQRT2
    values = np.where(inside, scale * p.value(z), 0.0)
    grad_sq = np.where(inside, (scale * p.derivative(z)) ** 2, 0.0)
    return SaddleField(m=m, R=R, h=h, values=values, inside=inside, grad_sq=grad_sq)


def run_checks(fld: Field, saddle: SaddleField, p: Profile1D, nl: Nonlinearity) -> List[EstimateReport]:
    """All checks of a converged solve, in reporting order."""
    return [
        modica_check(saddle, nl),
        pointwise_bound_check(saddle, p),
        supersolution_check(p, nl, fld.grid),
        strict_bound_check(fld, nl),
    ]
