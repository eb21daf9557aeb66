"""
Command-line entry point.

    python saddle_lab.py profile --nl sine --out out/sine
    python saddle_lab.py verify --m 2 --R 16 --h 0.125
    python saddle_lab.py stability --mode sweep --m 2 --a-list 5,10,20,40
    python saddle_lab.py pipeline --config configs/saddle_m2.conf
    python saddle_lab.py sweep configs/saddle_m1.conf configs/saddle_m2.conf
"""
import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from pipeline import run_pipeline, run_sweep
from utils.config import STABILITY_MODES, ExperimentConfig, load_config, parse_config
from utils.errors import exit_code_for
from utils.logger import get_logger

logger = get_logger("saddle-lab")

CSV_COLUMNS = """\
outputs (CSV with header row, JSON with "schema": 1):
  profile.csv   tau,u0,u0dot
  field.csv     s,t,u            (sector nodes, 0 <= t <= s)
  sweep.csv     a,value,scaled,boundary_correction
  growth.csv    R,energy
  *.json        profile, solve, verify, growth, stability reports; manifest.json

exit codes: 0 ok, 2 config error, 3 solver failure, 4 failed check
"""

_STAGES = {
    "profile": {"stages.profile": True, "stages.solve": False, "stages.verify": False, "stages.stability": False},
    "solve": {"stages.solve": True, "stages.verify": False, "stages.stability": False},
    "verify": {"stages.solve": True, "stages.verify": True, "stages.stability": False},
}


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="experiment config file (key = value)")
    parser.add_argument("--nl", dest="kind", help="nonlinearity kind: allen_cahn, sine or custom")
    parser.add_argument("--coeffs", help="odd-power coefficients for --nl custom, e.g. 1,-1")
    parser.add_argument("--m", type=int, help="half dimension, the space is R^{2m}")
    parser.add_argument("--R", type=float, help="ball radius")
    parser.add_argument("--h", type=float, help="lattice spacing")
    parser.add_argument("--bc", choices=("dirichlet", "profile"), help="outer arc boundary data")
    parser.add_argument("--method", choices=("newton", "gradient", "gauss_seidel"), help="minimization method")
    parser.add_argument("--max-iter", type=int, help="solver iteration budget")
    parser.add_argument("--tol", type=float, help="solver step tolerance")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saddle_lab",
        description="Saddle-shaped solutions of -Lap u = f(u) in R^{2m}: profiles, solves, estimates, stability.",
        epilog=CSV_COLUMNS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("profile", "tabulate the 1-D heteroclinic profile"),
                       ("solve", "minimize the energy on the sector of B_R"),
                       ("verify", "solve and run the a posteriori checks"),
                       ("pipeline", "run the stages enabled in the config")):
        _common_flags(sub.add_parser(name, help=text, epilog=CSV_COLUMNS,
                                     formatter_class=argparse.RawDescriptionHelpFormatter))

    stability = sub.add_parser("stability", help="second variation, spectrum and probes",
                               epilog=CSV_COLUMNS, formatter_class=argparse.RawDescriptionHelpFormatter)
    _common_flags(stability)
    stability.add_argument("--mode", choices=STABILITY_MODES, action="append",
                           help="repeatable; defaults to the config's stability.modes")
    stability.add_argument("--rho1", type=float)
    stability.add_argument("--rho2", type=float)
    stability.add_argument("--alpha", type=float)
    stability.add_argument("--a-list", help="comma-separated scales, e.g. 5,10,20,40")
    stability.add_argument("--k", type=int, help="number of eigenvalues (<= 20)")
    stability.add_argument("--annulus", action="append", help="inner:outer, repeatable")
    stability.add_argument("--trials", type=int, help="probe trials")

    sweep = sub.add_parser("sweep", help="run several configs through a worker pool")
    sweep.add_argument("configs", nargs="+", help="config files")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        "nonlinearity.kind": args.kind,
        "nonlinearity.coeffs": args.coeffs,
        "grid.m": args.m,
        "grid.R": args.R,
        "grid.h": args.h,
        "solver.bc": args.bc,
        "solver.method": args.method,
        "solver.max_iter": args.max_iter,
        "solver.tol": args.tol,
        "seed": args.seed,
        "output.dir": args.out,
    }
    overrides.update(_STAGES.get(args.command, {}))

    if args.command == "stability":
        modes = args.mode
        overrides.update({
            "stages.stability": True,
            "stages.verify": False,
            "stability.modes": ", ".join(modes) if modes else None,
            "stability.rho1": args.rho1,
            "stability.rho2": args.rho2,
            "stability.alpha": args.alpha,
            "stability.a_list": args.a_list,
            "stability.k": args.k,
            "stability.annuli": ", ".join(args.annulus) if args.annulus else None,
            "stability.probe_trials": args.trials,
        })
        if modes is not None:
            overrides["stages.solve"] = bool({"spectrum", "probe"} & set(modes))
    return {key: value for key, value in overrides.items() if value is not None}


def load(args: argparse.Namespace) -> ExperimentConfig:
    overrides = _overrides(args)
    if args.config:
        return load_config(args.config, overrides)
    return parse_config("", overrides)


def handle_run(args: argparse.Namespace) -> int:
    config = load(args)
    result = run_pipeline(config)
    print(json.dumps({
        "command": args.command,
        "exit_code": result.exit_code,
        "out_dir": str(result.out_dir),
        "artifacts": sorted(result.artifacts),
        "config_hash": result.config_hash,
    }))
    return result.exit_code


def handle_sweep(args: argparse.Namespace) -> int:
    configs = [load_config(path) for path in args.configs]
    code, results = run_sweep(configs)
    print(json.dumps({
        "command": "sweep",
        "exit_code": code,
        "runs": [{"config_hash": h, "exit_code": c, "out_dir": d} for h, c, d in results],
    }))
    return code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return handle_sweep(args)
        return handle_run(args)
    except Exception as e:
        logger.exception("command failed", command=args.command, error=str(e))
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
