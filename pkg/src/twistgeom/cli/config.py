"""Run configuration: flat ``key=value`` files overridden by command-line flags."""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from ..errors import ConfigError
from ..geometry.grid import DERIVATIVE_MODES

REPORT_ENV = "TWISTGEOM_REPORT"
SUITES = ("clifford", "geometry", "torsion", "twist", "action")


@dataclass(frozen=True)
class RunConfig:
    m: int = 2
    N: int = 16
    L: float = 2 * math.pi
    derivative: str = "spectral"
    tol_algebraic: float = 1e-12
    tol_derivative: float = 1e-10
    tol_relative: float = 1e-8
    seed: int = 0
    suites: tuple[str, ...] = SUITES
    include_m3: bool = False
    report: str = "twistgeom_report.json"
    out_dir: str = "."

    def validate(self) -> "RunConfig":
        if self.m not in (1, 2, 3):
            raise ConfigError("m must be 1, 2 or 3")
        if self.N < 4:
            raise ConfigError("N must be at least 4")
        if not self.L > 0:
            raise ConfigError("L must be positive")
        if self.derivative not in DERIVATIVE_MODES:
            raise ConfigError(f"derivative must be one of {', '.join(DERIVATIVE_MODES)}")
        for name in ("tol_algebraic", "tol_derivative", "tol_relative"):
            value = getattr(self, name)
            # zero is accepted on purpose: it makes every floating-point residual fail
            if not (value >= 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be a finite non-negative number")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown or not self.suites:
            raise ConfigError(f"unknown suite(s) {unknown}; choose from {', '.join(SUITES)}")
        return self

    def echo(self) -> dict:
        out = asdict(self)
        out["suites"] = list(self.suites)
        out.pop("report")
        out.pop("out_dir")
        return out


def _coerce(name: str, raw: str):
    types = {f.name: f.type for f in fields(RunConfig)}
    types["tolerance"] = "float"
    if name not in types:
        raise ConfigError(f"unknown configuration key {name!r}")
    kind = types[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = str(raw).strip().lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError(raw)
            return low in ("1", "true", "yes", "on")
        if name == "suites":
            return tuple(s.strip() for s in str(raw).split(",") if s.strip())
        return str(raw)
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for {name}") from None


def read_config_file(path: str | Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        values[key] = _coerce(key, value)
    return values


def build_config(file: str | None, overrides: dict) -> RunConfig:
    """Defaults < config file < environment (report path only) < flags."""
    env = os.environ.get(REPORT_ENV)
    layers = [read_config_file(file) if file else {}, {"report": env} if env else {},
              {k: v for k, v in overrides.items() if v is not None}]
    values: dict = {}
    for layer in layers:
        layer = dict(layer)
        # expand the shorthand inside its own layer so later layers still win
        tol = layer.pop("tolerance", None)
        if tol is not None:
            values.update(tol_algebraic=tol, tol_derivative=tol, tol_relative=tol)
        values.update(layer)
    return replace(RunConfig(), **values).validate()
