"""
JSON run logs and run metrics.

Every record is one JSON object on stderr; keyword arguments of the logging
calls become top-level fields next to the run context (run id, m, R, h).
"""
import json
import logging
import os
import time
import traceback
from datetime import datetime, timezone
from typing import Any, Dict, Optional

import psutil

DEFAULT_NAME = "saddle-lab"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


def _json_default(value: Any) -> Any:
    # numpy scalars and arrays reach the logger from the solvers
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


class JsonFormatter(logging.Formatter):
    """Formats a record as a single JSON line."""

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "timestamp": _utc_now(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        payload.update(getattr(record, "extra_fields", {}))
        if record.exc_info:
            kind, error, tb = record.exc_info
            payload["exception"] = {
                "type": kind.__name__,
                "message": str(error),
                "traceback": traceback.format_exception(kind, error, tb),
            }
        return json.dumps(payload, default=_json_default)


def _level_from_env() -> int:
    return getattr(logging, os.getenv("LOG_LEVEL", "INFO").upper(), logging.INFO)


class StructuredLogger:
    """
    Logger carrying a fixed context dict.

    log.info("solve finished", iterations=12) emits the context fields plus
    iterations=12. The stderr handler is attached once per logger name.
    """

    def __init__(self, name: str = DEFAULT_NAME, context: Optional[Dict[str, Any]] = None):
        self.logger = logging.getLogger(name)
        self.context = dict(context or {})
        if self.logger.handlers:
            return
        level = _level_from_env()
        handler = logging.StreamHandler()
        handler.setFormatter(JsonFormatter())
        handler.setLevel(level)
        self.logger.setLevel(level)
        self.logger.addHandler(handler)
        self.logger.propagate = False

    def _fields(self, extra: Dict[str, Any]) -> Dict[str, Any]:
        return {**self.context, **extra}

    def _emit(self, method: str, message: str, fields: Dict[str, Any]) -> None:
        getattr(self.logger, method)(message, extra={"extra_fields": self._fields(fields)})

    def bind(self, **fields) -> "StructuredLogger":
        """Same handler, more context."""
        return StructuredLogger(self.logger.name, self._fields(fields))

    def debug(self, message: str, **fields) -> None:
        self._emit("debug", message, fields)

    def info(self, message: str, **fields) -> None:
        self._emit("info", message, fields)

    def warning(self, message: str, **fields) -> None:
        self._emit("warning", message, fields)

    def error(self, message: str, **fields) -> None:
        self._emit("error", message, fields)

    def exception(self, message: str, **fields) -> None:
        """Error record with the active traceback attached."""
        self._emit("exception", message, fields)


def get_logger(name: str = DEFAULT_NAME, run_context: Optional[Dict[str, Any]] = None) -> StructuredLogger:
    """
    Structured logger for a module or a run.

    Args:
        name: Logger name
        run_context: Fields attached to every record, e.g. run_id, m, R, h;
            None values are dropped

    Returns:
        StructuredLogger
    """
    context = {key: value for key, value in (run_context or {}).items() if value is not None}
    return StructuredLogger(name, context)


class MetricsLogger:
    """
    Stage timings, solver counters and memory usage of one experiment run.

    The manifest stores snapshot(); reports never see these values, so they
    may vary between identical runs.
    """

    def __init__(self, logger: StructuredLogger):
        self.logger = logger
        self.reset()

    def reset(self) -> None:
        self.metrics: Dict[str, Any] = {}
        self.counters: Dict[str, int] = {}
        self.timers: Dict[str, float] = {}
        self.started = time.perf_counter()

    def record(self, name: str, value: Any) -> None:
        self.metrics[name] = value

    def increment(self, name: str, by: int = 1) -> None:
        self.counters[name] = self.counters.get(name, 0) + by

    def start_timer(self, name: str) -> None:
        self.timers[name] = time.perf_counter()

    def end_timer(self, name: str) -> float:
        """Seconds since start_timer(name), recorded as <name>_duration_seconds."""
        started = self.timers.pop(name, None)
        if started is None:
            self.logger.warning("timer was not started", timer=name)
            return 0.0
        duration = time.perf_counter() - started
        self.record(f"{name}_duration_seconds", duration)
        return duration

    def record_stage_metrics(self, stage: str, duration: float, ok: bool) -> None:
        self.record(f"{stage}_duration_seconds", duration)
        self.increment("stages_passed" if ok else "stages_failed")

    def record_solver_metrics(self, method: str, iterations: int, duration: float, converged: bool) -> None:
        self.record(f"solve_{method}_iterations", iterations)
        self.record(f"solve_{method}_duration_seconds", duration)
        self.increment("solves_converged" if converged else "solves_unconverged")

    def record_memory_usage(self) -> None:
        """Resident set size now and its peak over the calls so far."""
        try:
            process = psutil.Process()
            rss_mb = process.memory_info().rss / 2**20
            percent = process.memory_percent()
        except Exception as e:
            self.logger.warning("memory usage unavailable", error=str(e))
            return
        self.record("memory_used_mb", rss_mb)
        self.record("memory_peak_mb", max(rss_mb, self.metrics.get("memory_peak_mb", 0.0)))
        self.record("memory_percent", percent)

    def snapshot(self) -> Dict[str, Any]:
        """Metrics and counters as one flat dict, with totals refreshed."""
        self.record("total_execution_time_seconds", time.perf_counter() - self.started)
        passed = self.counters.get("stages_passed", 0)
        total = passed + self.counters.get("stages_failed", 0)
        if total:
            self.record("stage_pass_rate", round(passed / total, 3))
        self.record_memory_usage()
        return {**self.metrics, **{f"counter_{name}": count for name, count in self.counters.items()}}
