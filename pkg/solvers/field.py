"""
Nodal fields on the sector grid and their odd reflection to the quarter-plane.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from geometry.grid import NodeKind, TriangleGrid
from nonlinearities import Nonlinearity
from profiles.profile1d import Profile1D, profile_sector_values

BOUNDARY_MODES = ("dirichlet", "profile")


@dataclass(eq=False)
class Field:
    """
    Values of u_R at the grid nodes.

    Cone nodes are always 0. Arc nodes are 0 in the default 'dirichlet' mode
    and carry clamp(u0((s - t) / sqrt 2), 0, M) in 'profile' mode.
    """
    grid: TriangleGrid
    values: np.ndarray
    bc: str = "dirichlet"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise ValueError(f"values must have shape ({self.grid.n_nodes},), got {self.values.shape}")
        if self.bc not in BOUNDARY_MODES:
            raise ValueError(f"Unsupported boundary mode: {self.bc}. Supported modes: {', '.join(BOUNDARY_MODES)}")

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values, self.bc)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def invariant_violations(self, M: float) -> dict:
        """Size of each invariant violation; all zero for a valid field."""
        cone = self.grid.kind == NodeKind.CONE
        arc = self.grid.kind == NodeKind.ARC
        return {
            "cone": float(np.max(np.abs(self.values[cone]), initial=0.0)),
            "arc": float(np.max(np.abs(self.values[arc]), initial=0.0)) if self.bc == "dirichlet" else 0.0,
            "below_zero": float(max(0.0, -np.min(self.values))),
            "above_M": float(max(0.0, np.max(self.values) - M)),
        }

    def rows(self):
        return zip(self.grid.s, self.grid.t, self.values)


def boundary_values(grid: TriangleGrid, bc: str = "dirichlet", profile: Optional[Profile1D] = None) -> np.ndarray:
    """Values imposed on the Dirichlet set (cone and arc); zero elsewhere."""
    values = np.zeros(grid.n_nodes)
    if bc == "profile":
        if profile is None:
            raise ValueError("boundary mode 'profile' needs a Profile1D")
        arc = grid.kind == NodeKind.ARC
        values[arc] = profile_sector_values(profile, grid.s[arc], grid.t[arc])
    elif bc != "dirichlet":
        raise ValueError(f"Unsupported boundary mode: {bc}. Supported modes: {', '.join(BOUNDARY_MODES)}")
    return values


def initial_guess(grid: TriangleGrid, nl: Nonlinearity, bc: str = "dirichlet",
                  profile: Optional[Profile1D] = None) -> Field:
    """min{M, (s - t) / sqrt 2} off the Dirichlet set, boundary data on it."""
    values = np.minimum(nl.M, (grid.s - grid.t) / np.sqrt(2.0))
    dirichlet = grid.dirichlet_mask
    values[dirichlet] = boundary_values(grid, bc, profile)[dirichlet]
    return Field(grid, values, bc)


def zero_field(grid: TriangleGrid, bc: str = "dirichlet", profile: Optional[Profile1D] = None) -> Field:
    return Field(grid, boundary_values(grid, bc, profile), bc)


@dataclass(eq=False)
class SaddleField:
    """
    Odd field on the square lattice {0 <= s, t <= N h}, zero outside the disk.

    values[i, j] is u(i h, j h); values[j, i] = -values[i, j]. When grad_sq is
    given it holds exact |grad u|^2 at the lattice points.
    """
    m: int
    R: float
    h: float
    values: np.ndarray
    inside: np.ndarray
    grad_sq: Optional[np.ndarray] = None

    @property
    def axis(self) -> np.ndarray:
        return self.h * np.arange(self.values.shape[0])

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def coordinates(self):
        """(s, t) lattice arrays in 'ij' layout."""
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    @cached_property
    def _interpolator(self) -> RegularGridInterpolator:
        return RegularGridInterpolator((self.axis, self.axis), self.values, method="linear",
                                       bounds_error=False, fill_value=0.0)

    def value_at(self, s, t):
        """Bilinear interpolation of u at (s, t) >= 0."""
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        s, t = np.broadcast_arrays(s, t)
        out = self._interpolator(np.stack([s.ravel(), t.ravel()], axis=-1)).reshape(s.shape)
        return float(out) if out.ndim == 0 else out


def reflect_odd(fld: Field) -> SaddleField:
    """
    Extend u_R to the quarter-plane square by u(t, s) = -u(s, t).

    Requires the field to vanish on the cone nodes.
    """
    grid = fld.grid
    cone = grid.kind == NodeKind.CONE
    if np.any(fld.values[cone] != 0.0):
        raise ValueError("field must vanish on the cone before odd reflection")
    N = grid.lattice_size
    values = np.zeros((N + 1, N + 1))
    values[grid.i, grid.j] = fld.values
    values[grid.j, grid.i] = -fld.values
    np.fill_diagonal(values, 0.0)
    ii, jj = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
    inside = ii ** 2 + jj ** 2 <= (grid.R / grid.h) ** 2 * (1 + 1e-12)
    return SaddleField(m=grid.m, R=grid.R, h=grid.h, values=values, inside=inside)
