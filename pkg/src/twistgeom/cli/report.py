"""Machine-readable reports and CSV tables."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Check:
    name: str
    paper_anchor: str
    max_abs_error: float
    tolerance: float
    passed: bool
    notes: str = ""

    def as_dict(self) -> dict:
        err = self.max_abs_error
        return {
            "name": self.name,
            "paper_anchor": self.paper_anchor,
            "max_abs_error": err if math.isfinite(err) else None,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "notes": self.notes,
        }


def check(name: str, anchor: str, error, tolerance: float, notes: str = "") -> Check:
    err = float(np.real(error)) if np.ndim(error) == 0 else float(np.max(np.abs(error)))
    err = abs(err)
    ok = bool(math.isfinite(err) and err <= tolerance)
    return Check(name, anchor, err, float(tolerance), ok, notes)


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    pinned_signs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool": "twistgeom",
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "checks": [c.as_dict() for c in self.checks],
            "summary": {"total": len(self.checks),
                        "failed": sum(not c.passed for c in self.checks),
                        "pass": self.passed},
            "pinned_signs": self.pinned_signs,
            "results": self.results,
        }

    def dumps(self) -> str:
        return json.dumps(jsonable(self.as_dict()), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(), encoding="utf-8")
        return path


def _num(x: float):
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def jsonable(obj):
    """Convert numpy scalars, complex numbers and tuples; round floats to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _num(obj.real), "im": _num(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return obj


def write_table(path: str | Path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    return path
