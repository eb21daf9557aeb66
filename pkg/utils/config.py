"""
Experiment configuration.

Configs are flat ``key = value`` text with dotted section names::

    seed = 7
    grid.m = 2
    grid.R = 16
    nonlinearity.kind = allen_cahn
    stages.stability = true

Everything is validated against the module preconditions before a pipeline
starts; problems surface as ConfigError naming the offending key.
"""
import hashlib
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from utils.errors import ConfigError

NONLINEARITY_KINDS = ("allen_cahn", "sine", "custom")
SOLVER_METHODS = ("newton", "gradient", "gauss_seidel")
BOUNDARY_MODES = ("dirichlet", "profile")
STABILITY_MODES = ("form", "sweep", "spectrum", "hardy", "probe")


@dataclass(frozen=True)
class NonlinearityConfig:
    kind: str = "allen_cahn"
    coeffs: Tuple[float, ...] = ()
    M: float = 1.0


@dataclass(frozen=True)
class ProfileConfig:
    tau_max: float = 20.0
    n_nodes: int = 4001


@dataclass(frozen=True)
class GridConfig:
    m: int = 2
    R: float = 16.0
    h: float = 0.125


@dataclass(frozen=True)
class SolverConfig:
    method: str = "newton"
    bc: str = "dirichlet"
    max_iter: int = 2000
    tol: float = 1e-10


@dataclass(frozen=True)
class StabilityConfig:
    modes: Tuple[str, ...] = ("hardy", "sweep", "spectrum", "probe")
    k: int = 4
    rho1: float = 0.05
    rho2: float = 100.0
    alpha: float = 0.75
    a_list: Tuple[float, ...] = (5.0, 10.0, 20.0, 40.0)
    annuli: Tuple[Tuple[float, float], ...] = ()
    probe_trials: int = 200


@dataclass(frozen=True)
class GrowthConfig:
    radii: Tuple[float, ...] = (8.0, 16.0, 32.0)
    bc: str = "profile"


@dataclass(frozen=True)
class StagesConfig:
    profile: bool = True
    solve: bool = True
    verify: bool = True
    growth: bool = False
    stability: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    nonlinearity: NonlinearityConfig = field(default_factory=NonlinearityConfig)
    profile: ProfileConfig = field(default_factory=ProfileConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    stability: StabilityConfig = field(default_factory=StabilityConfig)
    growth: GrowthConfig = field(default_factory=GrowthConfig)
    stages: StagesConfig = field(default_factory=StagesConfig)
    output_dir: str = "out"
    seed: int = 0

    def validate(self) -> "ExperimentConfig":
        """Check every block against its preconditions; return self."""
        nl = self.nonlinearity
        if nl.kind not in NONLINEARITY_KINDS:
            raise ConfigError(f"nonlinearity.kind must be one of {', '.join(NONLINEARITY_KINDS)}, got {nl.kind!r}")
        if nl.kind == "custom" and not nl.coeffs:
            raise ConfigError("nonlinearity.coeffs is required for nonlinearity.kind = custom")
        if not nl.M > 0:
            raise ConfigError(f"nonlinearity.M must be positive, got {nl.M}")

        if self.profile.tau_max < 5:
            raise ConfigError(f"profile.tau_max must be >= 5, got {self.profile.tau_max}")
        if self.profile.n_nodes < 65:
            raise ConfigError(f"profile.n_nodes must be >= 65, got {self.profile.n_nodes}")

        grid = self.grid
        if grid.m < 1:
            raise ConfigError(f"grid.m must be >= 1, got {grid.m}")
        if grid.R < 4:
            raise ConfigError(f"grid.R must be >= 4, got {grid.R}")
        if not 0 < grid.h <= grid.R / 16:
            raise ConfigError(f"grid.h must satisfy 0 < h <= R/16 = {grid.R / 16:g}, got {grid.h}")

        solver = self.solver
        if solver.method not in SOLVER_METHODS:
            raise ConfigError(f"solver.method must be one of {', '.join(SOLVER_METHODS)}, got {solver.method!r}")
        if solver.bc not in BOUNDARY_MODES:
            raise ConfigError(f"solver.bc must be one of {', '.join(BOUNDARY_MODES)}, got {solver.bc!r}")
        if solver.max_iter < 1:
            raise ConfigError(f"solver.max_iter must be >= 1, got {solver.max_iter}")
        if not solver.tol > 0:
            raise ConfigError(f"solver.tol must be positive, got {solver.tol}")

        stab = self.stability
        unknown = [mode for mode in stab.modes if mode not in STABILITY_MODES]
        if unknown:
            raise ConfigError(f"stability.modes has unknown entries: {', '.join(unknown)}")
        if not 1 <= stab.k <= 20:
            raise ConfigError(f"stability.k must be in 1..20, got {stab.k}")
        if not 0 < stab.rho1 < 0.5:
            raise ConfigError(f"stability.rho1 must lie in (0, 1/2), got {stab.rho1}")
        if not stab.rho2 > 1:
            raise ConfigError(f"stability.rho2 must exceed 1, got {stab.rho2}")
        if not 0.5 < stab.alpha < 1:
            raise ConfigError(f"stability.alpha must lie in (1/2, 1), got {stab.alpha}")
        if any(a < 1 for a in stab.a_list) or list(stab.a_list) != sorted(set(stab.a_list)):
            raise ConfigError("stability.a_list must be increasing values >= 1")
        for inner, outer in stab.annuli:
            if not 0 <= inner < outer <= grid.R:
                raise ConfigError(f"stability.annuli entry {inner}:{outer} must satisfy 0 <= inner < outer <= R")
        if stab.probe_trials < 1:
            raise ConfigError(f"stability.probe_trials must be >= 1, got {stab.probe_trials}")

        growth = self.growth
        if growth.bc not in BOUNDARY_MODES:
            raise ConfigError(f"growth.bc must be one of {', '.join(BOUNDARY_MODES)}, got {growth.bc!r}")
        radii = list(growth.radii)
        if len(radii) < 3 or radii[0] < 4 or radii != sorted(set(radii)):
            raise ConfigError("growth.radii must be at least 3 increasing values >= 4")
        if self.stages.growth and not grid.h <= radii[-1] / 16:
            raise ConfigError(f"grid.h must satisfy h <= R/16 = {radii[-1] / 16:g} for growth.radii")

        stages = self.stages
        if stages.verify and not stages.solve:
            raise ConfigError("stages.verify requires stages.solve")
        if stages.stability and not stages.solve and ({"spectrum", "probe"} & set(stab.modes)):
            raise ConfigError("stability modes spectrum/probe require stages.solve")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def canonical_text(self) -> str:
        """Sorted key = value rendering used for hashing."""
        return "\n".join(f"{key} = {value}" for key, value in sorted(_flatten(self).items())) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()


_BLOCKS = {
    "nonlinearity": NonlinearityConfig,
    "profile": ProfileConfig,
    "grid": GridConfig,
    "solver": SolverConfig,
    "stability": StabilityConfig,
    "growth": GrowthConfig,
    "stages": StagesConfig,
}

_TOP_LEVEL = {"seed": "seed", "output.dir": "output_dir"}


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} expects a boolean, got {raw!r}")


def _parse_list(raw: str):
    return [item.strip() for item in raw.split(",") if item.strip()]


def _coerce(key: str, default: Any, raw: str) -> Any:
    try:
        if isinstance(default, bool):
            return _parse_bool(key, raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, str):
            return raw.strip()
        if key == "stability.annuli":
            pairs = []
            for item in _parse_list(raw):
                inner, outer = item.split(":")
                pairs.append((float(inner), float(outer)))
            return tuple(pairs)
        if key == "stability.modes":
            return tuple(_parse_list(raw))
        return tuple(float(item) for item in _parse_list(raw))
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key}: cannot parse {raw!r} ({e})") from e


def _parse_pairs(text: str) -> Dict[str, str]:
    pairs: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def parse_config(text: str, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Parse config text into a validated ExperimentConfig.

    Args:
        text: Flat dotted key = value text
        overrides: Extra dotted keys (e.g. from command-line flags), applied last

    Raises:
        ConfigError: Unknown key, unparsable value, or failed precondition
    """
    pairs = _parse_pairs(text)
    for key, value in (overrides or {}).items():
        if value is not None:
            pairs[key] = value if isinstance(value, str) else _render(value)

    blocks: Dict[str, Dict[str, Any]] = {name: {} for name in _BLOCKS}
    top: Dict[str, Any] = {}
    if "SADDLE_LAB_OUTPUT" in os.environ:
        top["output_dir"] = os.environ["SADDLE_LAB_OUTPUT"]

    for key, raw in pairs.items():
        if key in _TOP_LEVEL:
            attr = _TOP_LEVEL[key]
            top[attr] = _coerce(key, getattr(ExperimentConfig(), attr), raw)
            continue
        section, _, name = key.partition(".")
        block_cls = _BLOCKS.get(section)
        known = {f.name: f for f in fields(block_cls)} if block_cls else {}
        if name not in known:
            raise ConfigError(f"unknown config key {key!r}")
        blocks[section][name] = _coerce(key, getattr(block_cls(), name), raw)

    config = ExperimentConfig(
        **{name: replace(_BLOCKS[name](), **values) for name, values in blocks.items()},
        **top,
    )
    return config.validate()


def load_config(path, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Read and validate a config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_config(text, overrides)


def _render(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return ", ".join(":".join(str(v) for v in item) if isinstance(item, tuple) else str(item) for item in value)
    return str(value)


def _flatten(config: ExperimentConfig) -> Dict[str, str]:
    flat = {"seed": _render(config.seed), "output.dir": config.output_dir}
    for section in _BLOCKS:
        block = getattr(config, section)
        for f in fields(block):
            flat[f"{section}.{f.name}"] = _render(getattr(block, f.name))
    return flat
