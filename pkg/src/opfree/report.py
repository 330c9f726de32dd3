"""Verification reports: per-check records plus run environment."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np

REPORT_SCHEMA_VERSION = "1.0"

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


def digest(*parts) -> str:
    """Short stable hash of the inputs of a check (arrays hashed by bytes)."""
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, np.ndarray):
            h.update(np.ascontiguousarray(part).tobytes())
        elif isinstance(part, (list, tuple)):
            h.update(digest(*part).encode())
        else:
            h.update(repr(part).encode())
        h.update(b"|")
    return h.hexdigest()[:16]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass
class CheckRecord:
    name: str
    status: str
    value: float | None = None
    threshold: float | None = None
    inputs_digest: str = ""
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == PASS


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add(self, name, status, value=None, threshold=None, inputs_digest="", **details):
        rec = CheckRecord(name, status, value, threshold, inputs_digest, details)
        self.checks.append(rec)
        return rec

    def add_bound(self, name, value, threshold, inputs_digest="", **details):
        """Record a check that passes iff ``value <= threshold``."""
        status = PASS if value <= threshold else FAIL
        return self.add(name, status, float(value), float(threshold), inputs_digest, **details)

    @property
    def status(self):
        states = {c.status for c in self.checks}
        if FAIL in states:
            return FAIL
        if INCONCLUSIVE in states:
            return INCONCLUSIVE
        return PASS

    @property
    def passed(self):
        return self.status == PASS

    def to_dict(self, include_timing=True):
        out = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "suite": self.suite,
            "status": self.status,
            "environment": _jsonable(self.environment),
            "checks": [_jsonable(asdict(c)) for c in self.checks],
        }
        if include_timing:
            out["timing"] = {"wall_time_s": self.wall_time}
        return out

    def to_json(self, include_timing=True):
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)

    def table(self):
        """Plain-text summary, one line per check."""
        width = max([len(c.name) for c in self.checks] + [5])
        lines = [f"suite: {self.suite}  status: {self.status.upper()}"]
        for c in self.checks:
            val = "" if c.value is None else f"{c.value:.3e}"
            thr = "" if c.threshold is None else f"{c.threshold:.1e}"
            lines.append(f"  {c.name:<{width}}  {c.status:<12}  {val:>10}  {thr:>8}")
        return "\n".join(lines)


_NUM = {"type": ["number", "null"]}

REPORT_JSON_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": REPORT_SCHEMA_VERSION},
        "suite": {"type": "string"},
        "status": {"enum": [PASS, FAIL, INCONCLUSIVE]},
        "environment": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "status": {"enum": [PASS, FAIL, INCONCLUSIVE]},
                    "value": _NUM,
                    "threshold": _NUM,
                    "inputs_digest": {"type": "string"},
                    "details": {"type": "object"},
                },
                "required": ["name", "status", "value", "threshold", "inputs_digest", "details"],
                "additionalProperties": False,
            },
        },
        "timing": {
            "type": "object",
            "properties": {"wall_time_s": {"type": "number"}},
            "required": ["wall_time_s"],
            "additionalProperties": False,
        },
    },
    "required": ["schema_version", "suite", "status", "environment", "checks"],
    "additionalProperties": False,
}
