"""Verification reports: named residual checks with deterministic JSON and CSV output."""
import csv
import io
import json
import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self):
        return math.isfinite(self.residual) and self.residual <= self.tolerance

    def as_dict(self):
        res = float(self.residual)
        return {
            "name": self.name,
            "residual": res if math.isfinite(res) else None,
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }


@dataclass
class Report:
    command: str
    parameters: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    adopted_conventions: dict = field(default_factory=dict)
    wall_time_ms: int = 0

    def add(self, name, residual, tolerance):
        self.checks.append(Check(name, float(residual), float(tolerance)))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "command": self.command,
            "parameters": _plain(self.parameters),
            "checks": [c.as_dict() for c in self.checks],
            "adopted_conventions": _plain(self.adopted_conventions),
            "wall_time_ms": int(self.wall_time_ms),
        }

    def to_json(self):
        return dumps(self.as_dict())

    def table(self):
        width = max([len(c.name) for c in self.checks] + [5])
        lines = [f"{'check':<{width}}  {'residual':>11}  {'tolerance':>9}  result"]
        for c in self.checks:
            res = f"{c.residual:11.3e}" if math.isfinite(c.residual) else f"{'nan':>11}"
            lines.append(f"{c.name:<{width}}  {res}  {c.tolerance:9.1e}  {'PASS' if c.passed else 'FAIL'}")
        return "\n".join(lines)


def dumps(obj):
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_csv(header, rows):
    """RFC 4180 text (CRLF line ends, minimal quoting) with a header row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_plain(v) for v in row])
    return buf.getvalue()
