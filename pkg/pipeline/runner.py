"""
Staged experiment runs: profile -> solve -> verify -> growth -> stability.

Each stage writes its reports into the output directory; manifest.json records
the config hash, versions, metrics and the exit code of the run.
"""
import os
from dataclasses import dataclass, field, replace
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from estimates import run_checks
from geometry.grid import build_grid
from nonlinearities import Nonlinearity, check_hypotheses, get_nonlinearity
from profiles.profile1d import Profile1D, build_profile
from solvers import (
    SolverOptions,
    energy_growth_study,
    energy_terms,
    initial_guess,
    minimize,
    reflect_odd,
    zero_field_growth,
)
from solvers.field import Field
from stability import (
    EtaFamily,
    ScaledProfileTestFunction,
    asymptotic_functional,
    cone_vanishing_stability_probe,
    hardy_margin,
    instability_sweep,
    linearized_spectrum,
    morse_annuli,
    quadratic_form_ibp,
    quadratic_form_yz,
)
from utils.config import ExperimentConfig
from utils.errors import EXIT_OK, EXIT_SOLVER, EXIT_VERIFICATION, SaddleLabError, exit_code_for
from utils.logger import MetricsLogger, get_logger
from utils.reports import write_csv, write_json, write_manifest


@dataclass
class PipelineResult:
    exit_code: int
    out_dir: Path
    artifacts: List[str] = field(default_factory=list)
    config_hash: str = ""


class _Run:
    """State shared by the stages of one pipeline run."""

    def __init__(self, config: ExperimentConfig, out_dir: Path):
        self.config = config
        self.out_dir = out_dir
        self.config_hash = config.config_hash()
        self.logger = get_logger("saddle-lab", {
            "run_id": self.config_hash[:12], "m": config.grid.m, "R": config.grid.R, "h": config.grid.h,
        })
        self.metrics = MetricsLogger(self.logger)
        self.artifacts: List[str] = []
        self.exit_code = EXIT_OK
        self.nl: Optional[Nonlinearity] = None
        self.profile: Optional[Profile1D] = None
        self.field: Optional[Field] = None

    def json(self, name: str, payload: Any) -> None:
        write_json(self.out_dir / name, payload)
        self.artifacts.append(name)

    def csv(self, name: str, header: Sequence[str], rows) -> None:
        write_csv(self.out_dir / name, header, rows)
        self.artifacts.append(name)

    def fail(self, code: int) -> None:
        self.exit_code = max(self.exit_code, code)


def build_nonlinearity(config: ExperimentConfig) -> Nonlinearity:
    nl = config.nonlinearity
    return get_nonlinearity(nl.kind, nl.coeffs, nl.M)


def _solver_options(config: ExperimentConfig) -> SolverOptions:
    return SolverOptions(method=config.solver.method, max_iter=config.solver.max_iter, tol=config.solver.tol)


def _profile_stage(run: _Run) -> None:
    cfg = run.config.profile
    run.profile = build_profile(run.nl, tau_max=cfg.tau_max, n_nodes=cfg.n_nodes)
    run.csv("profile.csv", ("tau", "u0", "u0dot"), run.profile.rows())
    run.json("profile.json", {
        "profile": run.profile.summary(),
        "hypotheses": check_hypotheses(run.nl).to_dict(),
    })


def _solve_stage(run: _Run) -> None:
    cfg = run.config
    grid = build_grid(cfg.grid.m, cfg.grid.R, cfg.grid.h)
    start = initial_guess(grid, run.nl, cfg.solver.bc, run.profile)
    opts = _solver_options(cfg)
    run.field, report = minimize(start, run.nl, opts)
    run.metrics.record_solver_metrics(opts.method, report.iterations, report.wall_seconds, report.converged)
    terms = energy_terms(run.field, run.nl)
    run.csv("field.csv", ("s", "t", "u"), run.field.rows())
    run.json("solve.json", {
        "grid": grid.summary(),
        "solve": report.to_dict(),
        "energy_terms": {"gradient": terms.gradient, "potential": terms.potential, "a_m": terms.a_m},
    })
    if not report.converged:
        run.logger.warning("solve did not converge", iterations=report.iterations)
        run.fail(EXIT_SOLVER)


def _verify_stage(run: _Run) -> None:
    saddle = reflect_odd(run.field)
    checks = run_checks(run.field, saddle, run.profile, run.nl)
    violations = run.field.invariant_violations(run.nl.M)
    run.json("verify.json", {
        "checks": [c.to_dict() for c in checks],
        "invariants": violations,
        "pass": all(c.passed for c in checks),
    })
    for check in checks:
        if not check.passed:
            run.logger.warning("check failed", check=check.name, worst=check.worst_violation,
                               tolerance=check.tolerance_used)
            run.fail(EXIT_VERIFICATION)


def _growth_stage(run: _Run) -> None:
    cfg = run.config
    m = cfg.grid.m
    study = energy_growth_study(run.nl, m, cfg.growth.radii, cfg.grid.h, bc=cfg.growth.bc,
                                opts=_solver_options(cfg), profile=run.profile)
    control = zero_field_growth(run.nl, m, cfg.growth.radii, cfg.grid.h)
    run.csv("growth.csv", ("R", "energy"), study.rows())
    run.json("growth.json", {
        "saddle": study.to_dict(),
        "zero_field": control.to_dict(),
        "expected_slope": 2 * m - 1,
    })
    if not study.solve_report.converged:
        run.logger.warning("growth solve did not converge", iterations=study.solve_report.iterations)
        run.fail(EXIT_SOLVER)


def _stability_stage(run: _Run) -> None:
    cfg = run.config.stability
    m = run.config.grid.m
    fam = EtaFamily(cfg.rho1, cfg.rho2, cfg.alpha)
    payload: Dict[str, Any] = {"eta": fam.to_dict()}

    if "hardy" in cfg.modes:
        payload["hardy"] = {
            "hardy_margin": hardy_margin(m) if m >= 2 else None,
            "asymptotic_functional": asymptotic_functional(fam, m),
        }
    if "form" in cfg.modes:
        xi = ScaledProfileTestFunction(fam, run.profile, cfg.a_list[0])
        payload["form"] = {
            "direct": quadratic_form_yz(run.profile, xi, run.nl, m).to_dict(),
            "ibp": quadratic_form_ibp(run.profile, xi, run.nl, m).to_dict(),
        }
    if "sweep" in cfg.modes:
        sweep = instability_sweep(run.profile, run.nl, m, fam, cfg.a_list)
        payload["sweep"] = sweep.to_dict()
        run.csv("sweep.csv", ("a", "value", "scaled", "boundary_correction"), sweep.rows())
    if "spectrum" in cfg.modes and run.field is not None:
        spectrum = linearized_spectrum(run.field, run.nl, k=cfg.k)
        payload["spectrum"] = spectrum.to_dict()
        # the saddle in R^4 is unstable
        if m == 2 and spectrum.lambda_min >= -spectrum.tol:
            run.logger.warning("saddle has no negative direction", lambda_min=spectrum.lambda_min,
                               tol=spectrum.tol)
            run.fail(EXIT_VERIFICATION)
        if cfg.annuli:
            payload["morse_annuli"] = morse_annuli(run.field, run.nl, cfg.annuli).to_dict()
    if "probe" in cfg.modes and run.field is not None:
        if check_hypotheses(run.nl).h3.passed:
            probe = cone_vanishing_stability_probe(run.field, run.nl, trials=cfg.probe_trials,
                                                   seed=run.config.seed)
            payload["probe"] = probe.to_dict()
            if not probe.passed:
                run.fail(EXIT_VERIFICATION)
        else:
            payload["probe"] = {"skipped": "nonlinearity does not satisfy H3"}

    run.json("stability.json", payload)


def _stages(config: ExperimentConfig):
    stages = config.stages
    needs_profile = (stages.profile or stages.verify or config.solver.bc == "profile"
                     or (stages.growth and config.growth.bc == "profile")
                     or (stages.stability and {"form", "sweep"} & set(config.stability.modes)))
    plan = []
    if needs_profile:
        plan.append(("profile", _profile_stage))
    if stages.solve:
        plan.append(("solve", _solve_stage))
    if stages.verify:
        plan.append(("verify", _verify_stage))
    if stages.growth:
        plan.append(("growth", _growth_stage))
    if stages.stability:
        plan.append(("stability", _stability_stage))
    return plan


def run_pipeline(config: ExperimentConfig, out_dir: Optional[Path] = None) -> PipelineResult:
    """
    Run the enabled stages of a validated config.

    Stage errors are logged and mapped to exit codes; later stages are skipped.
    """
    out_dir = Path(out_dir or config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run = _Run(config, out_dir)
    run.logger.info("pipeline started", out_dir=str(out_dir))

    try:
        run.nl = build_nonlinearity(config)
        for name, stage in _stages(config):
            run.metrics.start_timer(name)
            before = run.exit_code
            stage(run)
            run.metrics.record_stage_metrics(name, run.metrics.end_timer(name), run.exit_code == before)
    except (SaddleLabError, ValueError) as e:
        run.logger.exception("pipeline stage failed", error=str(e))
        run.fail(exit_code_for(e))

    run.metrics.record_memory_usage()
    write_manifest(out_dir, run.config_hash, config.to_dict(), run.metrics.snapshot(), run.exit_code, run.artifacts)
    run.logger.info("pipeline finished", exit_code=run.exit_code, artifacts=len(run.artifacts))
    return PipelineResult(exit_code=run.exit_code, out_dir=out_dir, artifacts=run.artifacts,
                          config_hash=run.config_hash)


def _sweep_worker(config: ExperimentConfig) -> Tuple[str, int, str]:
    result = run_pipeline(config)
    return result.config_hash, result.exit_code, str(result.out_dir)


def sweep_workers(n_configs: int) -> int:
    """Worker count, capped by SADDLE_LAB_THREADS."""
    limit = os.getenv("SADDLE_LAB_THREADS")
    cap = int(limit) if limit else (os.cpu_count() or 1)
    return max(1, min(n_configs, cap))


def run_sweep(configs: Sequence[ExperimentConfig]) -> Tuple[int, List[Tuple[str, int, str]]]:
    """
    Run several configs through a worker pool, each into <output_dir>/<hash prefix>.

    Returns the worst exit code and one (hash, exit code, directory) per config.
    """
    if not configs:
        raise ValueError("sweep needs at least one config")
    placed = [replace(c, output_dir=str(Path(c.output_dir) / c.config_hash()[:12])) for c in configs]
    workers = sweep_workers(len(placed))
    if workers == 1:
        results = [_sweep_worker(c) for c in placed]
    else:
        with Pool(workers) as pool:
            results = pool.map(_sweep_worker, placed)
    return max(code for _, code, _ in results), results
