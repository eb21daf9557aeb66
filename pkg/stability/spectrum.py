"""
Spectrum of the linearized operator -Delta - f'(u) on the sector grid.

The discrete quadratic form

    Q(xi) = sum_edges kappa (xi_a - xi_b)^2 - sum_nodes mass f'(u) xi^2

is paired with the mass form B(xi) = sum mass xi^2. Perturbations vanish on
the outer arc. They are free on the cone (even under s <-> t) unless
cone_vanishing is set (odd perturbations, Dirichlet on the cone).
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import eigh
from scipy.sparse.linalg import splu

from geometry.grid import NodeKind
from nonlinearities import Nonlinearity
from solvers.field import Field
from utils.errors import EigenConvergenceFailure
from utils.logger import get_logger

logger = get_logger(__name__)

MAX_EIGENVALUES = 20


@dataclass(frozen=True)
class EigenOptions:
    shift_margin: float = 0.1
    tol: float = 1e-10
    max_iter: int = 3000
    seed: int = 0
    extra: int = 4
    negative_tol: float = 1e-6


@dataclass
class DiscreteForm:
    A: sparse.csc_matrix
    B: sparse.csc_matrix
    free: np.ndarray
    n_nodes: int

    def embed(self, vectors: np.ndarray) -> np.ndarray:
        """Extend free-node vectors by zero to all grid nodes."""
        out = np.zeros((self.n_nodes,) + vectors.shape[1:])
        out[self.free] = vectors
        return out


@dataclass
class SpectrumReport:
    eigenvalues: List[float]
    morse_count: int
    annulus: Optional[Tuple[float, float]]
    tol: float
    iterations: int
    cone_vanishing: bool = False
    eigenvectors: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def lambda_min(self) -> float:
        return self.eigenvalues[0]

    @property
    def saturated(self) -> bool:
        """Every computed eigenvalue is negative; the true count may be larger."""
        return self.morse_count == len(self.eigenvalues)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eigenvalues": self.eigenvalues,
            "lambda_min": self.lambda_min,
            "morse_count": self.morse_count,
            "saturated": self.saturated,
            "annulus": list(self.annulus) if self.annulus else None,
            "negative_tol": self.tol,
            "iterations": self.iterations,
            "cone_vanishing": self.cone_vanishing,
        }


def assemble_quadratic_form(fld: Field, nl: Nonlinearity, support: Optional[np.ndarray] = None,
                            cone_vanishing: bool = False) -> DiscreteForm:
    """
    Restrict Q and B to the admissible nodes.

    Nodes without mass and without edges (the origin when m >= 2) carry no
    degree of freedom and are dropped.
    """
    grid = fld.grid
    K = grid.stiffness
    free = grid.kind != NodeKind.ARC
    if cone_vanishing:
        free &= grid.kind != NodeKind.CONE
    if support is not None:
        free &= support
    free &= (grid.mass > 0) | (K.diagonal() > 0)
    idx = np.flatnonzero(free)
    mass = grid.mass[idx]
    A = (K[idx][:, idx] - sparse.diags(mass * nl.fprime(fld.values[idx]))).tocsc()
    B = sparse.diags(mass).tocsc()
    return DiscreteForm(A=A, B=B, free=idx, n_nodes=grid.n_nodes)


def _b_orthonormalize(X: np.ndarray, B) -> np.ndarray:
    """Modified Gram-Schmidt in the B inner product."""
    X = X.copy()
    for j in range(X.shape[1]):
        for i in range(j):
            X[:, j] -= (X[:, i] @ (B @ X[:, j])) * X[:, i]
        norm = np.sqrt(X[:, j] @ (B @ X[:, j]))
        if not norm > 0:
            raise EigenConvergenceFailure("iteration subspace lost rank")
        X[:, j] /= norm
    return X


def operator_norm_estimate(form: DiscreteForm) -> float:
    """Gershgorin bound of B^-1 A over the rows with mass."""
    mass = form.B.diagonal()
    rows = np.asarray(abs(form.A).sum(axis=1)).ravel()
    weighted = mass > 0
    return float(np.max(rows[weighted] / mass[weighted], initial=1.0))


def _smallest_eigenpairs(form: DiscreteForm, nl: Nonlinearity, k: int, opts: EigenOptions):
    n = form.free.size
    p = min(k + opts.extra, n)
    if n < k:
        raise ValueError(f"only {n} free nodes, cannot compute {k} eigenvalues")

    sigma = -(max(nl.linearization_bound(), 0.0) + opts.shift_margin)
    lu = splu((form.A - sigma * form.B).tocsc())
    rng = np.random.default_rng(opts.seed)
    X = _b_orthonormalize(rng.standard_normal((n, p)), form.B)

    theta_old = np.full(p, np.inf)
    for iteration in range(1, opts.max_iter + 1):
        Y = _b_orthonormalize(lu.solve(form.B @ X), form.B)
        reduced_A = Y.T @ (form.A @ Y)
        reduced_B = Y.T @ (form.B @ Y)
        theta, V = eigh(0.5 * (reduced_A + reduced_A.T), 0.5 * (reduced_B + reduced_B.T))
        X = Y @ V
        change = np.abs(theta[:k] - theta_old[:k])
        if np.all(change < opts.tol * np.maximum(1.0, np.abs(theta[:k]))):
            return theta[:k], X[:, :k], iteration
        theta_old = theta
        if iteration % 100 == 0:
            logger.debug("inverse iteration", iteration=iteration, lambda_min=float(theta[0]),
                         change=float(np.max(change)))

    raise EigenConvergenceFailure(f"inverse iteration did not converge in {opts.max_iter} iterations")


def linearized_spectrum(fld: Field, nl: Nonlinearity, k: int = 4, annulus: Optional[Tuple[float, float]] = None,
                        cone_vanishing: bool = False, opts: Optional[EigenOptions] = None) -> SpectrumReport:
    """
    k smallest eigenvalues of A xi = lambda B xi by shifted block inverse iteration.

    The shift sits below -sup f', so A - sigma B is positive definite.

    Raises:
        ValueError: k outside [1, 20] or an empty annulus
        EigenConvergenceFailure: no convergence within max_iter
    """
    opts = opts or EigenOptions()
    if not 1 <= k <= MAX_EIGENVALUES:
        raise ValueError(f"k must lie in [1, {MAX_EIGENVALUES}], got {k}")
    support = None
    if annulus is not None:
        inner, outer = annulus
        if not 0 <= inner < outer:
            raise ValueError(f"annulus must satisfy 0 <= inner < outer, got {annulus}")
        support = fld.grid.annulus_mask(inner, outer)

    form = assemble_quadratic_form(fld, nl, support, cone_vanishing)
    theta, X, iterations = _smallest_eigenpairs(form, nl, k, opts)
    tol = opts.negative_tol * operator_norm_estimate(form)
    report = SpectrumReport(
        eigenvalues=[float(v) for v in theta],
        morse_count=int(np.sum(theta < -tol)),
        annulus=tuple(float(a) for a in annulus) if annulus else None,
        tol=tol,
        iterations=iterations,
        cone_vanishing=cone_vanishing,
        eigenvectors=form.embed(X),
    )
    logger.info("linearized spectrum", lambda_min=report.lambda_min, morse_count=report.morse_count,
                annulus=report.annulus, iterations=iterations)
    return report


@dataclass
class MorseAnnuliReport:
    reports: List[SpectrumReport]
    union_count: int
    disjoint: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "annuli": [r.to_dict() for r in self.reports],
            "union_count": self.union_count,
            "disjoint": self.disjoint,
        }


def _supports_disjoint(fld: Field, masks: Sequence[np.ndarray]) -> bool:
    """No shared node and no edge between any two masks."""
    adjacency = fld.grid.adjacency()
    for a in range(len(masks)):
        reach = masks[a] | (adjacency @ masks[a].astype(np.int64) > 0)
        for b in range(a + 1, len(masks)):
            if np.any(reach & masks[b]):
                return False
    return True


def morse_annuli(fld: Field, nl: Nonlinearity, annuli: Sequence[Tuple[float, float]], k: int = 1,
                 opts: Optional[EigenOptions] = None) -> MorseAnnuliReport:
    """
    Negative directions supported in each annulus.

    Eigenvectors of disjoint, non-adjacent annuli are Q- and B-orthogonal, so
    the counts add up to a lower bound of the Morse index on the union.
    """
    reports = [linearized_spectrum(fld, nl, k=k, annulus=tuple(a), opts=opts) for a in annuli]
    masks = [fld.grid.annulus_mask(*a) for a in annuli]
    return MorseAnnuliReport(
        reports=reports,
        union_count=sum(r.morse_count for r in reports),
        disjoint=_supports_disjoint(fld, masks),
    )


def discrete_form(fld: Field, nl: Nonlinearity, xi: np.ndarray) -> float:
    """Q(xi) over all nodes."""
    grid = fld.grid
    xi = np.asarray(xi, dtype=float)
    return float(xi @ (grid.stiffness @ xi) - np.sum(grid.mass * nl.fprime(fld.values) * xi ** 2))


def rayleigh_quotient(fld: Field, nl: Nonlinearity, xi: np.ndarray, cone_vanishing: bool = False) -> float:
    """
    Q(xi) / B(xi) for an admissible nodal perturbation.

    Raises:
        ValueError: xi is nonzero on the arc, or on the cone when cone_vanishing
    """
    grid = fld.grid
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (grid.n_nodes,):
        raise ValueError(f"xi must have shape ({grid.n_nodes},), got {xi.shape}")
    if np.any(xi[grid.kind == NodeKind.ARC] != 0.0):
        raise ValueError("perturbation must vanish on the outer arc")
    if cone_vanishing and np.any(xi[grid.kind == NodeKind.CONE] != 0.0):
        raise ValueError("perturbation must vanish on the cone")
    norm = float(np.sum(grid.mass * xi ** 2))
    if not norm > 0:
        raise ValueError("perturbation has zero mass norm")
    return discrete_form(fld, nl, xi) / norm
