"""
Discrete reduced energy

    E(u) = a_m [ sum_edges kappa (u_a - u_b)^2 / 2 + sum_nodes mass G(u) ]

and the residuals of its Euler-Lagrange equation

    -(u_ss + u_tt) - (m - 1)(u_s / s + u_t / t) = f(u).
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from geometry.grid import NodeKind, TriangleGrid
from nonlinearities import Nonlinearity
from solvers.field import Field


@dataclass(frozen=True)
class EnergyTerms:
    gradient: float
    potential: float
    a_m: float

    @property
    def total(self) -> float:
        return self.a_m * (self.gradient + self.potential)


def _ball_masks(grid: TriangleGrid, radius: Optional[float]):
    if radius is None:
        return None, None
    nodes = grid.radius <= radius * (1 + 1e-12)
    edges = nodes[grid.edge_a] & nodes[grid.edge_b]
    return nodes, edges


def energy_terms(fld: Field, nl: Nonlinearity, radius: Optional[float] = None) -> EnergyTerms:
    """Gradient and potential parts of the sector energy, optionally restricted to B_radius."""
    grid = fld.grid
    u = fld.values
    nodes, edges = _ball_masks(grid, radius)
    jumps = grid.edge_kappa * (u[grid.edge_a] - u[grid.edge_b]) ** 2
    density = grid.mass * nl.G(u)
    if nodes is not None:
        jumps = jumps[edges]
        density = density[nodes]
    return EnergyTerms(gradient=0.5 * float(np.sum(jumps)), potential=float(np.sum(density)), a_m=grid.a_m)


def discrete_energy(fld: Field, nl: Nonlinearity, radius: Optional[float] = None) -> float:
    """a_m times the discrete sector energy; restricted to B_radius when given."""
    return energy_terms(fld, nl, radius).total


def energy_gradient(fld: Field, nl: Nonlinearity) -> np.ndarray:
    """Nodal gradient K u - mass f(u) of the sector energy (without a_m)."""
    grid = fld.grid
    return grid.stiffness @ fld.values - grid.mass * nl.f(fld.values)


def checked_nodes(grid: TriangleGrid) -> np.ndarray:
    """Interior nodes with s >= 2h and t >= 2h."""
    return (grid.kind == NodeKind.INTERIOR) & (grid.i >= 2) & (grid.j >= 2)


def el_residual(fld: Field, nl: Nonlinearity) -> np.ndarray:
    """
    Central-difference residual of the reduced equation at the checked nodes,
    NaN elsewhere.
    """
    grid = fld.grid
    u = fld.values
    h, m = grid.h, grid.m
    out = np.full(grid.n_nodes, np.nan)
    nodes = np.flatnonzero(checked_nodes(grid))
    i, j = grid.i[nodes], grid.j[nodes]
    east, west = u[grid.index[i + 1, j]], u[grid.index[i - 1, j]]
    north, south = u[grid.index[i, j + 1]], u[grid.index[i, j - 1]]
    centre = u[nodes]
    s, t = i * h, j * h
    laplacian = (east + west + north + south - 4.0 * centre) / h ** 2
    drift = (m - 1) * ((east - west) / (2 * h * s) + (north - south) / (2 * h * t))
    out[nodes] = -laplacian - drift - nl.f(centre)
    return out


def discrete_residual(fld: Field, nl: Nonlinearity) -> np.ndarray:
    """
    Row residual of the discrete Euler-Lagrange system divided by the node mass;
    at zero-mass nodes (axis, m >= 2) the flux residual divided by the row scale.
    """
    grid = fld.grid
    gradient = energy_gradient(fld, nl)
    scale = np.where(grid.mass > 0, grid.mass, grid.stiffness.diagonal())
    scale = np.where(scale > 0, scale, 1.0)
    return gradient / scale
