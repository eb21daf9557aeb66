import json
from dataclasses import dataclass

import numpy as np

from utils.reports import SCHEMA_VERSION, dumps_report, to_jsonable, write_csv, write_json, write_manifest


@dataclass
class _Plain:
    x: float
    flags: tuple


@dataclass
class _WithDict:
    x: float

    def to_dict(self):
        return {"renamed": self.x}


class TestToJsonable:
    """Tests for to_jsonable"""

    def test_numpy_values(self):
        """numpy scalars and arrays become plain Python"""
        value = to_jsonable({"a": np.float64(1.5), "b": np.int64(3), "c": np.array([1.0, 2.0]), "d": np.bool_(True)})

        assert value == {"a": 1.5, "b": 3, "c": [1.0, 2.0], "d": True}
        assert type(value["b"]) is int and type(value["d"]) is bool

    def test_non_finite_floats(self):
        """NaN and infinities are written as null"""
        assert to_jsonable([np.nan, float("inf"), 1.0]) == [None, None, 1.0]

    def test_dataclasses(self):
        """to_dict wins over the field dump"""
        assert to_jsonable(_Plain(1.0, (2, 3))) == {"x": 1.0, "flags": [2, 3]}
        assert to_jsonable(_WithDict(1.0)) == {"renamed": 1.0}


class TestWriters:
    """Tests for the JSON, CSV and manifest writers"""

    def test_dumps_is_deterministic(self):
        """Sorted keys and the schema version"""
        text = dumps_report({"b": 1, "a": 2})

        assert text == dumps_report({"a": 2, "b": 1})
        assert json.loads(text) == {"schema": SCHEMA_VERSION, "a": 2, "b": 1}

    def test_lists_are_wrapped(self):
        """Non-dict payloads go under 'items'"""
        assert json.loads(dumps_report([1, 2])) == {"schema": SCHEMA_VERSION, "items": [1, 2]}

    def test_write_json_creates_directories(self, tmp_path):
        """Parents are created on demand"""
        path = write_json(tmp_path / "deep" / "report.json", {"value": np.float64(0.25)})

        assert json.loads(path.read_text())["value"] == 0.25

    def test_write_csv(self, tmp_path):
        """Header row, then floats in round-trip precision"""
        path = write_csv(tmp_path / "rows.csv", ("tau", "u0"), [(0.1, np.float64(1 / 3)), (2, 0.5)])

        lines = path.read_text().splitlines()

        assert lines[0] == "tau,u0"
        assert lines[1] == f"0.1,{repr(1 / 3)}"
        assert lines[2] == "2,0.5"

    def test_manifest(self, tmp_path):
        """manifest.json records hash, versions, exit code and sorted artifacts"""
        write_manifest(tmp_path, "abc", {"seed": 0}, {"total_execution_time_seconds": 1.0}, 0, ["z.csv", "a.json"])

        manifest = json.loads((tmp_path / "manifest.json").read_text())

        assert manifest["config_hash"] == "abc"
        assert set(manifest["versions"]) == {"python", "numpy", "scipy"}
        assert manifest["artifacts"] == ["a.json", "z.csv"]
        assert manifest["exit_code"] == 0
