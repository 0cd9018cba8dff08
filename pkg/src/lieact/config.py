"""Run configuration for the verification driver.

Config files are flat ``key = value`` lines; ``#`` starts a comment and list
values are comma separated::

    action_ids = so2-r2-punctured, se2-r2
    suites = group_laws, flows
    trials = 200
    seed = 7
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .actions import builtin_actions
from .errors import ConfigError
from .suites import SUITE_NAMES

REPORT_DIR_ENV = "LIEACT_REPORT_DIR"
DEFAULT_REPORT_NAME = "verify-report.json"


def default_report_path() -> str:
    return str(Path(os.environ.get(REPORT_DIR_ENV, ".")) / DEFAULT_REPORT_NAME)


@dataclass(frozen=True)
class RunConfig:
    action_ids: tuple = ()
    trials: int = 500
    seed: int = 42
    fd_step: float = 1e-6
    tol_fd: float = 1e-6
    tol_analytic: float = 1e-9
    report_path: str = field(default_factory=default_report_path)
    suites: tuple = SUITE_NAMES

    def __post_init__(self):
        # an empty action list means every builtin action
        if not self.action_ids:
            object.__setattr__(self, "action_ids", tuple(builtin_actions()))
        object.__setattr__(self, "action_ids", tuple(self.action_ids))
        object.__setattr__(self, "suites", tuple(self.suites))
        for name in ("fd_step", "tol_fd", "tol_analytic"):
            v = getattr(self, name)
            if isinstance(v, int) and not isinstance(v, bool):
                object.__setattr__(self, name, float(v))
        self.validate()

    def validate(self):
        known = builtin_actions()
        bad = [a for a in self.action_ids if a not in known]
        if bad:
            raise ConfigError(f"unknown action id(s): {', '.join(bad)}")
        bad = [s for s in self.suites if s not in SUITE_NAMES]
        if bad:
            raise ConfigError(f"unknown suite(s): {', '.join(bad)}")
        if not self.suites:
            raise ConfigError("no suites selected")
        if len(set(self.action_ids)) != len(self.action_ids):
            raise ConfigError("duplicate action ids")
        if len(set(self.suites)) != len(self.suites):
            raise ConfigError("duplicate suites")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.seed, int) or not -(2**63) <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit integer, got {self.seed!r}")
        for name in ("fd_step", "tol_fd", "tol_analytic"):
            v = getattr(self, name)
            if not (isinstance(v, float) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {v!r}")

    def echo(self) -> dict:
        """Settings that determine the report contents (the output path does not)."""
        return {
            "action_ids": list(self.action_ids),
            "suites": list(self.suites),
            "trials": self.trials,
            "seed": self.seed,
            "fd_step": self.fd_step,
            "tol_fd": self.tol_fd,
            "tol_analytic": self.tol_analytic,
        }


_LIST_KEYS = {"action_ids", "suites"}
_INT_KEYS = {"trials", "seed"}
_FLOAT_KEYS = {"fd_step", "tol_fd", "tol_analytic"}


def coerce(key: str, raw: str):
    """Parse one textual value for ``key``."""
    raw = raw.strip()
    if key in _LIST_KEYS:
        return tuple(p.strip() for p in raw.split(",") if p.strip())
    if key in _INT_KEYS:
        try:
            return int(raw, 0)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    if key in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if key == "report_path":
        if not raw:
            raise ConfigError("report_path is empty")
        return raw
    raise ConfigError(f"unknown config key {key!r}")


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines into a dict of typed values."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            out[key] = coerce(key, value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return out


def load_config(path=None, **overrides) -> RunConfig:
    """Defaults, then the file at ``path``, then non-None ``overrides``."""
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        values.update(parse_config_text(text, str(path)))
    values.update({k: v for k, v in overrides.items() if v is not None})
    names = {f.name for f in fields(RunConfig)}
    unknown = set(values) - names
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    return RunConfig(**values)


def with_overrides(cfg: RunConfig, **changes) -> RunConfig:
    return replace(cfg, **{k: v for k, v in changes.items() if v is not None})
