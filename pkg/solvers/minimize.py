"""
Minimization of the discrete sector energy over fields that vanish on the
cone, take the boundary data on the arc, and stay in [0, M].

Methods:
    newton        majorize-minimize steps with P = K + L mass (one sparse LU),
                  then projected Newton once steps fall below switch_tol
    gradient      projected Jacobi-preconditioned descent with backtracking;
                  a unit step is h^2 / 4 per unit weight
    gauss_seidel  red-black nonlinear sweeps with a majorized local update

Every accepted iterate satisfies E_new <= E_old + energy_slack * max(1, |E|).
"""
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve, splu

from geometry.grid import NodeKind
from nonlinearities import Nonlinearity, check_hypotheses
from solvers.energy import checked_nodes, discrete_residual, el_residual
from solvers.field import Field
from utils.errors import NonDecreaseFailure
from utils.logger import get_logger

logger = get_logger(__name__)

METHODS = ("newton", "gradient", "gauss_seidel")


@dataclass(frozen=True)
class SolverOptions:
    method: str = "newton"
    max_iter: int = 2000
    tol: float = 1e-10
    step: float = 1.0
    energy_slack: float = 1e-12
    switch_tol: float = 1e-4
    max_backtracks: int = 40
    log_every: int = 100


@dataclass
class SolveReport:
    """
    Outcome of one minimization.

    el_residual_sup is the central-difference residual of the reduced
    equation over interior nodes with s, t >= 2h; discrete_residual_sup is the
    residual of the discrete variational equations over all free nodes.
    """
    energy: float
    iterations: int
    final_step_norm: float
    el_residual_sup: float
    positivity_min: float
    discrete_residual_sup: float
    axis_flux_sup: float
    sup_norm: float
    converged: bool
    method: str
    bc: str
    wall_seconds: float = 0.0
    energy_history: List[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "energy": self.energy,
            "iterations": self.iterations,
            "final_step_norm": self.final_step_norm,
            "el_residual_sup": self.el_residual_sup,
            "positivity_min": self.positivity_min,
            "discrete_residual_sup": self.discrete_residual_sup,
            "axis_flux_sup": self.axis_flux_sup,
            "sup_norm": self.sup_norm,
            "converged": self.converged,
            "method": self.method,
            "bc": self.bc,
            "energy_history_length": len(self.energy_history),
        }


class _ReducedProblem:
    """Sector energy as a function of the free nodal values."""

    def __init__(self, fld: Field, nl: Nonlinearity):
        grid = fld.grid
        self.nl = nl
        self.grid = grid
        self.free = np.flatnonzero(~grid.dirichlet_mask)
        self.K = grid.stiffness
        self.K_ff = self.K[self.free][:, self.free].tocsc()
        self.mass = grid.mass
        self.mass_f = grid.mass[self.free]
        self.lipschitz = max(nl.potential_curvature_bound(), 0.0) * (1 + 1e-6) + 1e-12
        self.jacobi = self.K_ff.diagonal() + self.lipschitz * self.mass_f

    def energy(self, u: np.ndarray) -> float:
        return float(0.5 * u @ (self.K @ u) + self.mass @ self.nl.G(u))

    def gradient(self, u: np.ndarray) -> np.ndarray:
        return (self.K @ u - self.mass * self.nl.f(u))[self.free]

    def hessian(self, u: np.ndarray):
        return (self.K_ff - sparse.diags(self.mass_f * self.nl.fprime(u[self.free]))).tocsc()

    def majorant(self):
        return (self.K_ff + sparse.diags(self.lipschitz * self.mass_f)).tocsc()

    def moved(self, u: np.ndarray, direction: np.ndarray, alpha: float) -> np.ndarray:
        trial = u.copy()
        trial[self.free] = np.clip(u[self.free] + alpha * direction, 0.0, self.nl.M)
        return trial

    def at_rounding_floor(self, g: np.ndarray) -> bool:
        scale = np.maximum(self.jacobi, 1e-300) * max(self.nl.M, 1.0)
        return bool(np.max(np.abs(g) / scale, initial=0.0) <= 1e-11)


def _line_search(problem: _ReducedProblem, u: np.ndarray, direction: np.ndarray, energy: float,
                 opts: SolverOptions, alpha: float = 1.0) -> Optional[Tuple[np.ndarray, float]]:
    threshold = energy + opts.energy_slack * max(1.0, abs(energy))
    for _ in range(opts.max_backtracks):
        trial = problem.moved(u, direction, alpha)
        trial_energy = problem.energy(trial)
        if trial_energy <= threshold:
            return trial, trial_energy
        alpha *= 0.5
    return None


def _descend(problem: _ReducedProblem, u: np.ndarray, directions, energy: float, g: np.ndarray,
             opts: SolverOptions, alpha: float = 1.0):
    """Try each direction in turn; the last resort is the Jacobi direction."""
    for direction in directions:
        accepted = _line_search(problem, u, direction, energy, opts, alpha)
        if accepted is not None:
            return accepted
    if problem.at_rounding_floor(g):
        return None
    raise NonDecreaseFailure(
        f"no step decreases the energy (E = {energy:.12g}, |g| = {np.max(np.abs(g)):.3e}); "
        "try a smaller solver.step or the gauss_seidel method"
    )


def _run_newton(problem: _ReducedProblem, u: np.ndarray, opts: SolverOptions):
    majorant = splu(problem.majorant())
    energy = problem.energy(u)
    history = [energy]
    phase = "majorize"
    step_norm = np.inf
    converged = False
    iterations = 0

    for iterations in range(1, opts.max_iter + 1):
        g = problem.gradient(u)
        directions = []
        if phase == "newton":
            newton = spsolve(problem.hessian(u), -g)
            if np.all(np.isfinite(newton)) and g @ newton < 0:
                directions.append(newton)
        directions.append(-majorant.solve(g))
        directions.append(-g / problem.jacobi)

        accepted = _descend(problem, u, directions, energy, g, opts)
        if accepted is None:
            step_norm = 0.0
            converged = True
            break
        trial, energy = accepted
        step_norm = float(np.max(np.abs(trial - u)))
        u = trial
        history.append(energy)

        if iterations % opts.log_every == 0:
            logger.debug("newton progress", iteration=iterations, phase=phase, energy=energy, step=step_norm)
        if step_norm < opts.tol:
            converged = True
            break
        if phase == "majorize" and step_norm < opts.switch_tol:
            phase = "newton"

    return u, iterations, step_norm, history, converged


def _run_gradient(problem: _ReducedProblem, u: np.ndarray, opts: SolverOptions):
    energy = problem.energy(u)
    history = [energy]
    step_norm = np.inf
    converged = False
    iterations = 0

    for iterations in range(1, opts.max_iter + 1):
        g = problem.gradient(u)
        accepted = _descend(problem, u, [-g / problem.jacobi], energy, g, opts, alpha=opts.step)
        if accepted is None:
            step_norm = 0.0
            converged = True
            break
        trial, energy = accepted
        step_norm = float(np.max(np.abs(trial - u)))
        u = trial
        history.append(energy)

        if iterations % opts.log_every == 0:
            logger.debug("gradient progress", iteration=iterations, energy=energy, step=step_norm)
        if step_norm < opts.tol:
            converged = True
            break

    return u, iterations, step_norm, history, converged


def _run_gauss_seidel(problem: _ReducedProblem, u: np.ndarray, opts: SolverOptions):
    grid = problem.grid
    colour = (grid.i[problem.free] + grid.j[problem.free]) % 2
    sweeps = [np.flatnonzero(colour == c) for c in (0, 1)]
    energy = problem.energy(u)
    history = [energy]
    step_norm = np.inf
    converged = False
    iterations = 0

    for iterations in range(1, opts.max_iter + 1):
        previous = u.copy()
        for local in sweeps:
            g = problem.gradient(u)
            nodes = problem.free[local]
            u[nodes] = np.clip(u[nodes] - g[local] / problem.jacobi[local], 0.0, problem.nl.M)

        new_energy = problem.energy(u)
        if new_energy > energy + opts.energy_slack * max(1.0, abs(energy)):
            raise NonDecreaseFailure(f"Gauss-Seidel sweep raised the energy from {energy:.12g} to {new_energy:.12g}")
        energy = new_energy
        history.append(energy)
        step_norm = float(np.max(np.abs(u - previous)))

        if iterations % opts.log_every == 0:
            logger.debug("gauss-seidel progress", iteration=iterations, energy=energy, step=step_norm)
        if step_norm < opts.tol:
            converged = True
            break

    return u, iterations, step_norm, history, converged


_RUNNERS = {
    "newton": _run_newton,
    "gradient": _run_gradient,
    "gauss_seidel": _run_gauss_seidel,
}


def minimize(fld: Field, nl: Nonlinearity, opts: Optional[SolverOptions] = None) -> Tuple[Field, SolveReport]:
    """
    Minimize the discrete energy starting from fld.

    Args:
        fld: Starting field; its values on the Dirichlet set are kept
        nl: Nonlinearity satisfying H1 and H2
        opts: Solver options

    Returns:
        (minimizing field, SolveReport)

    Raises:
        NonDecreaseFailure: No admissible step decreases the energy away from a critical point
    """
    opts = opts or SolverOptions()
    if opts.method not in _RUNNERS:
        raise ValueError(f"Unsupported solver method: {opts.method}. Supported methods: {', '.join(METHODS)}")
    hypotheses = check_hypotheses(nl)
    if not (hypotheses.h1.passed and hypotheses.h2.passed):
        raise ValueError("minimize requires a nonlinearity satisfying H1 and H2")

    started = time.time()
    problem = _ReducedProblem(fld, nl)
    u = fld.values.copy()
    u[problem.free] = np.clip(u[problem.free], 0.0, nl.M)
    u[fld.grid.kind == NodeKind.CONE] = 0.0

    u, iterations, step_norm, history, converged = _RUNNERS[opts.method](problem, u, opts)
    result = fld.with_values(u)
    report = _solve_report(result, nl, problem, history, iterations, step_norm, converged, opts.method)
    report.wall_seconds = time.time() - started

    log = logger.info if converged else logger.warning
    log("minimization finished", method=opts.method, m=fld.grid.m, R=fld.grid.R, h=fld.grid.h,
        iterations=iterations, energy=report.energy, step=step_norm, converged=converged)
    return result, report


def _solve_report(fld: Field, nl: Nonlinearity, problem: _ReducedProblem, history: List[float],
                  iterations: int, step_norm: float, converged: bool, method: str) -> SolveReport:
    grid = fld.grid
    a_m = grid.a_m
    u = fld.values
    checked = checked_nodes(grid)
    residual = el_residual(fld, nl)
    row = discrete_residual(fld, nl)
    free = problem.free
    axis = grid.kind[free] == NodeKind.AXIS
    interior = grid.kind == NodeKind.INTERIOR
    return SolveReport(
        energy=a_m * history[-1],
        iterations=iterations,
        final_step_norm=float(step_norm),
        el_residual_sup=float(np.max(np.abs(residual[checked]), initial=0.0)),
        positivity_min=float(np.min(u[interior])),
        discrete_residual_sup=float(np.max(np.abs(row[free]), initial=0.0)),
        axis_flux_sup=float(np.max(np.abs(row[free][axis]), initial=0.0)),
        sup_norm=float(np.max(np.abs(u))),
        converged=converged,
        method=method,
        bc=fld.bc,
        energy_history=[a_m * e for e in history],
    )
