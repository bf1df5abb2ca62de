"""JSON reports emitted by the command line tool.

The body of a report (everything except ``timing``) is a deterministic
function of the inputs; durations live in ``timing`` so that two runs can
be compared with :func:`body`.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import jsonschema

from . import __version__
from .battery import CheckResult

_CHECK = {
    "type": "object",
    "required": ["name", "status", "value", "expected", "basis"],
    "properties": {
        "name": {"type": "string"},
        "tag": {"type": "string"},
        "criterion": {"type": ["integer", "null"]},
        "status": {"enum": ["pass", "fail", "skip"]},
        "value": {"type": "string"},
        "expected": {"type": "string"},
        "basis": {"type": "string"},
        "detail": {"type": "string"},
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["tool", "version", "command", "input_digest", "checks", "summary", "result"],
    "properties": {
        "tool": {"const": "galoislattice"},
        "version": {"type": "string"},
        "command": {"type": "string"},
        "input_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "checks": {"type": "array", "items": _CHECK},
        "summary": {
            "type": "object",
            "required": ["passed", "failed", "skipped", "status"],
            "properties": {
                "passed": {"type": "integer"},
                "failed": {"type": "integer"},
                "skipped": {"type": "integer"},
                "status": {"enum": ["pass", "fail"]},
            },
        },
        "result": {"type": "object"},
        "timing": {"type": "object", "additionalProperties": {"type": "number"}},
    },
}


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def summarize(checks: list[CheckResult]) -> dict:
    counts = {s: sum(1 for c in checks if c.status == s) for s in ("pass", "fail", "skip")}
    return {
        "passed": counts["pass"],
        "failed": counts["fail"],
        "skipped": counts["skip"],
        "status": "fail" if counts["fail"] else "pass",
    }


def build(command: str, inputs, checks: list[CheckResult], result: dict, timing: dict | None = None) -> dict:
    report = {
        "tool": "galoislattice",
        "version": __version__,
        "command": command,
        "input_digest": digest(inputs),
        "checks": [c.to_json() for c in checks],
        "summary": summarize(checks),
        "result": result,
    }
    if timing is not None:
        report["timing"] = {k: round(v, 6) for k, v in timing.items()}
    validate(report)
    return report


def validate(report: dict) -> None:
    jsonschema.validate(report, SCHEMA)


def body(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write(report: dict, path: str | Path) -> None:
    Path(path).write_text(dumps(report))
