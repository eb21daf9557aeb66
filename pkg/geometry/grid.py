"""
Uniform lattice discretization of the sector O_R = {0 <= t <= s, s^2 + t^2 <= R^2}.

Nodes are (s, t) = (i h, j h) with 0 <= j <= i. Each node owns the part of
the dual cell [s - h/2, s + h/2] x [t - h/2, t + h/2] lying in the sector, so
the reduced energy

    int s^{m-1} t^{m-1} (|grad u|^2 / 2 + G(u)) ds dt

becomes a sum over edges (flux weights kappa) and nodes (control-volume
masses). The weights are chosen so that the discrete Euler-Lagrange equations
at nodes with i, j >= 2 are the central-difference reduced equation for m <= 4.
"""
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import Tuple

import numpy as np
from scipy import sparse
from scipy.special import gamma

from utils.errors import GridTooCoarse

MIN_INTERIOR_NODES = 100


class NodeKind(IntEnum):
    INTERIOR = 0
    CONE = 1
    AXIS = 2
    ARC = 3


def sphere_area(k: int) -> float:
    """Area of the unit sphere S^{k-1} in R^k."""
    return float(2.0 * np.pi ** (0.5 * k) / gamma(0.5 * k))


def energy_constant(m: int) -> float:
    """a_m = |S^{m-1}|^2, the factor turning sector integrals into R^{2m} integrals."""
    return sphere_area(m) ** 2


@dataclass(frozen=True, eq=False)
class TriangleGrid:
    """
    Sector lattice with node classification, weights and edge fluxes.

    Classification priority at corners is cone > arc > axis > interior.
    Arc nodes form the outermost lattice layer inside the disk: a node is on
    the arc when its right or upper neighbour leaves the disk.
    """
    m: int
    R: float
    h: float
    i: np.ndarray
    j: np.ndarray
    kind: np.ndarray
    weights: np.ndarray
    mass: np.ndarray
    edge_a: np.ndarray
    edge_b: np.ndarray
    edge_kappa: np.ndarray
    index: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return int(self.i.size)

    @property
    def s(self) -> np.ndarray:
        return self.i * self.h

    @property
    def t(self) -> np.ndarray:
        return self.j * self.h

    @property
    def nodes(self) -> np.ndarray:
        return np.column_stack([self.s, self.t])

    @property
    def radius(self) -> np.ndarray:
        return np.hypot(self.s, self.t)

    @property
    def lattice_size(self) -> int:
        """Largest lattice index N along an axis."""
        return int(self.index.shape[0] - 2)

    def mask(self, kind: NodeKind) -> np.ndarray:
        return self.kind == kind

    @property
    def dirichlet_mask(self) -> np.ndarray:
        """Cone and arc nodes, where the minimization fixes the values."""
        return (self.kind == NodeKind.CONE) | (self.kind == NodeKind.ARC)

    @property
    def a_m(self) -> float:
        return energy_constant(self.m)

    def volume(self) -> float:
        """Discrete measure of the sector, sum of the masses (without a_m)."""
        return float(np.sum(self.mass))

    def annulus_mask(self, inner: float, outer: float) -> np.ndarray:
        """
        Nodes strictly inside the annulus inner < r < outer, kept h/2 away from
        interior boundaries so that masks of adjacent annuli share no edge.
        """
        r = self.radius
        keep = np.ones(self.n_nodes, dtype=bool)
        if inner > 0:
            keep &= r > inner + 0.5 * self.h
        if outer < self.R:
            keep &= r < outer - 0.5 * self.h
        return keep

    def node_index(self, s: float, t: float) -> int:
        """Index of the lattice node at (s, t); -1 when it is not a node."""
        i, j = int(round(s / self.h)), int(round(t / self.h))
        if abs(i * self.h - s) > 1e-9 * self.h or abs(j * self.h - t) > 1e-9 * self.h:
            return -1
        if not (0 <= i < self.index.shape[0] and 0 <= j < self.index.shape[1]):
            return -1
        return int(self.index[i, j])

    @cached_property
    def stiffness(self) -> sparse.csr_matrix:
        """K with u.K.u = sum_e kappa_e (u_a - u_b)^2."""
        n = self.n_nodes
        a, b, k = self.edge_a, self.edge_b, self.edge_kappa
        rows = np.concatenate([a, b, a, b])
        cols = np.concatenate([a, b, b, a])
        vals = np.concatenate([k, k, -k, -k])
        return sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()

    def adjacency(self) -> sparse.csr_matrix:
        n = self.n_nodes
        ones = np.ones(self.edge_a.size, dtype=bool)
        graph = sparse.coo_matrix((ones, (self.edge_a, self.edge_b)), shape=(n, n))
        return (graph + graph.T).tocsr()

    def summary(self):
        return {
            "m": self.m,
            "R": self.R,
            "h": self.h,
            "n_nodes": self.n_nodes,
            "counts": {kind.name.lower(): int(np.sum(self.kind == kind)) for kind in NodeKind},
            "volume": self.volume(),
            "a_m": self.a_m,
        }


def _radial_weight(m: int, s, t):
    return np.power(s, m - 1) * np.power(t, m - 1)


def _edge_factor(m: int, k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    One-dimensional flux weight of the lattice edge (k, k + 1), in units of h^{m-1}.

    The product of the m - 1 lattice points centred at k + 1/2; its ratio
    across a node k equals (2k + m - 1) / (2k - m + 1), which makes the flux
    difference reproduce the central difference of (m - 1) u' / s. Where that
    product is not positive, the midpoint power (k + 1/2)^{m-1} is used.
    Returns (factor, exact).
    """
    k = np.asarray(k, dtype=float)
    points = k[..., None] + 0.5 + (np.arange(m - 1) - (m - 2) / 2.0)
    exact = np.all(points > 0, axis=-1)
    return np.where(exact, np.prod(points, axis=-1), (k + 0.5) ** (m - 1)), exact


def _node_factor(m: int, k: np.ndarray) -> np.ndarray:
    """One-dimensional node weight in units of h^{m-1}, matched to the two edges at k."""
    k = np.asarray(k, dtype=float)
    right, right_exact = _edge_factor(m, k)
    _, left_exact = _edge_factor(m, k - 1)
    matched = (k > 0) & right_exact & left_exact
    ratio = 2.0 * k / np.maximum(2.0 * k + m - 1, 1.0)
    return np.where(matched, right * ratio, k ** (m - 1))


def build_grid(m: int, R: float, h: float) -> TriangleGrid:
    """
    Build the sector lattice of spacing h over O_R.

    Raises:
        ValueError: m < 1, R < 4, or h outside (0, R/16]
        GridTooCoarse: fewer than 100 interior nodes
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if R < 4:
        raise ValueError(f"R must be >= 4, got {R}")
    if not 0 < h <= R / 16 * (1 + 1e-12):
        raise ValueError(f"h must satisfy 0 < h <= R/16 = {R / 16:g}, got {h}")

    limit = (R / h) ** 2 * (1 + 1e-12)
    N = int(np.floor(R / h + 1e-9))
    ii, jj = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
    keep = (jj <= ii) & (ii ** 2 + jj ** 2 <= limit)
    i, j = ii[keep], jj[keep]
    n = i.size

    index = np.full((N + 2, N + 2), -1, dtype=np.int64)
    index[i, j] = np.arange(n)

    kind = np.full(n, NodeKind.INTERIOR, dtype=np.int8)
    kind[j == 0] = NodeKind.AXIS
    leaves_disk = ((i + 1) ** 2 + j ** 2 > limit) | (i ** 2 + (j + 1) ** 2 > limit)
    kind[leaves_disk] = NodeKind.ARC
    kind[i == j] = NodeKind.CONE

    interior = int(np.sum(kind == NodeKind.INTERIOR))
    if interior < MIN_INTERIOR_NODES:
        raise GridTooCoarse(f"grid m={m}, R={R}, h={h} has only {interior} interior nodes")

    s, t = i * h, j * h
    weights = _radial_weight(m, s, t) * h ** 2
    fraction = np.where(j == 0, 0.5, 1.0) * np.where(i == j, 0.5, 1.0)
    fraction[(i == 0) & (j == 0)] = 0.125
    node_s, node_t = _node_factor(m, i), _node_factor(m, j)
    unit = h ** (2 * m - 2)
    mass = node_s * node_t * unit * h ** 2 * fraction

    right = index[i + 1, j]
    has_right = right >= 0
    kappa_right = _edge_factor(m, i)[0] * node_t * unit * np.where(j == 0, 0.5, 1.0)

    up = index[i, j + 1]
    has_up = (j + 1 <= i) & (up >= 0)
    kappa_up = node_s * _edge_factor(m, j)[0] * unit

    nodes = np.arange(n)
    edge_a = np.concatenate([nodes[has_right], nodes[has_up]])
    edge_b = np.concatenate([right[has_right], up[has_up]])
    edge_kappa = np.concatenate([kappa_right[has_right], kappa_up[has_up]])

    return TriangleGrid(
        m=m, R=float(R), h=float(h), i=i, j=j, kind=kind, weights=weights, mass=mass,
        edge_a=edge_a, edge_b=edge_b, edge_kappa=edge_kappa, index=index,
    )
