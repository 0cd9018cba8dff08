"""Run the property suites and serialize a byte-reproducible JSON report."""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .actions import builtin_action
from .config import RunConfig
from .suites import RNG_ALGORITHM, SUITE_NAMES, Check, Settings, run_one

REPORT_FORMAT = "lieact-verify-report/1"


@dataclass
class Report:
    config: RunConfig
    suites: dict
    wall_time: float

    @property
    def checks(self) -> list:
        return [c for checks in self.suites.values() for c in checks]

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        """The serialized form; wall time is left out so reruns are byte-identical."""
        checks = self.checks
        return {
            "format": REPORT_FORMAT,
            "version": __version__,
            "rng": RNG_ALGORITHM,
            "config": self.config.echo(),
            "suites": [
                {"suite": name, "checks": [c.as_dict() for c in cs]}
                for name, cs in self.suites.items()
            ],
            "summary": {
                "checks": len(checks),
                "failed": sum(not c.passed for c in checks),
            },
            "overall_pass": self.overall_pass,
        }

    def dumps(self) -> str:
        return dumps(self.to_dict())


def _settings(cfg: RunConfig) -> Settings:
    return Settings(trials=cfg.trials, seed=cfg.seed, fd_step=cfg.fd_step,
                    tol_fd=cfg.tol_fd, tol_analytic=cfg.tol_analytic)


def _task(args):
    suite, action, settings = args
    return run_one(suite, builtin_action(action), settings)


def run_suite(cfg: RunConfig, *, jobs: int = 1, write: bool = True) -> Report:
    """Run every selected (suite, action) pair and optionally write the report.

    Each pair draws from its own RNG stream, so ``jobs > 1`` yields the same
    report as a serial run.
    """
    start = time.perf_counter()
    settings = _settings(cfg)
    order = [s for s in SUITE_NAMES if s in cfg.suites]
    tasks = [(s, a, settings) for s in order for a in cfg.action_ids]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    suites = {s: [] for s in order}
    for (s, _, _), checks in zip(tasks, results):
        suites[s].extend(checks)
    report = Report(cfg, suites, time.perf_counter() - start)
    if write:
        write_report(report, cfg.report_path)
    return report


def write_report(report: Report, path) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(report.dumps().encode("utf-8"))


# -- deterministic JSON ------------------------------------------------------

def format_float(x: float) -> str:
    """17 significant digits; non-finite values become strings."""
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _encode(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(_string(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{_string(str(k))}: ")
            _encode(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _encode(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _string(s: str) -> str:
    import json

    return json.dumps(s, ensure_ascii=False)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with insertion-ordered keys and 17-digit floats."""
    out = []
    _encode(obj, indent, 0, out)
    out.append("\n")
    return "".join(out)


__all__ = ["Report", "run_suite", "write_report", "dumps", "format_float", "Check"]
