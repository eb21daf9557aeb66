"""
Report serialization.

JSON reports are deterministic: sorted keys, no timestamps, numpy values
converted to plain Python. Anything run-specific (wall times, versions)
goes into the manifest instead.
"""
import csv
import json
import math
import platform
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Sequence

import numpy as np
import scipy

SCHEMA_VERSION = 1


def to_jsonable(value: Any) -> Any:
    """Convert dataclasses, numpy scalars/arrays and non-finite floats to JSON values."""
    if is_dataclass(value) and not isinstance(value, type):
        if hasattr(value, "to_dict"):
            return to_jsonable(value.to_dict())
        return to_jsonable(asdict(value))
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        number = float(value)
        return number if math.isfinite(number) else None
    return value


def dumps_report(payload: Any) -> str:
    body = to_jsonable(payload)
    if isinstance(body, dict):
        body = {"schema": SCHEMA_VERSION, **body}
    else:
        body = {"schema": SCHEMA_VERSION, "items": body}
    return json.dumps(body, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path, payload: Any) -> Path:
    """Write a schema-versioned JSON report and return its path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(payload), encoding="utf-8")
    return path


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a plot-ready CSV with a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def environment_versions() -> Dict[str, str]:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def write_manifest(directory, config_hash: str, config: Mapping[str, Any], metrics: Mapping[str, Any],
                   exit_code: int, artifacts: Sequence[str]) -> Path:
    """Write manifest.json with config hash, versions, wall times and outputs."""
    manifest = {
        "config_hash": config_hash,
        "config": config,
        "versions": environment_versions(),
        "metrics": metrics,
        "exit_code": exit_code,
        "artifacts": sorted(artifacts),
    }
    return write_json(Path(directory) / "manifest.json", manifest)
