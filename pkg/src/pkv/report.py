"""Check reports and their text/JSON renderings."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import Any, Iterable, TextIO

from .errors import PKVError

PASS, FAIL, SKIPPED, NOT_APPLICABLE, INDETERMINATE = "pass", "fail", "skipped", "not-applicable", "indeterminate"
STATUSES = (PASS, FAIL, SKIPPED, NOT_APPLICABLE, INDETERMINATE)
VERSION = 1


@dataclass
class CheckReport:
    name: str
    status: str
    anchor: str
    witness: Any = None
    ms: float = 0.0
    suite: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if not self.anchor:
            raise ValueError("a check needs a nonempty anchor")
        if self.status == FAIL and self.witness in (None, "", [], {}):
            raise ValueError(f"failing check {self.name!r} has no witness")

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "anchor": self.anchor,
                "witness": self.witness, "ms": round(self.ms, 3)}

    @classmethod
    def from_dict(cls, d: dict, suite: str = "") -> "CheckReport":
        return cls(d["name"], d["status"], d["anchor"], d.get("witness"), float(d.get("ms", 0.0)), suite)


def summarize(reports: Iterable[CheckReport]) -> dict:
    """Counts of pass and fail; every other status is counted as skipped."""
    out = {"pass": 0, "fail": 0, "skipped": 0}
    for r in reports:
        out[r.status if r.status in (PASS, FAIL) else "skipped"] += 1
    return out


def exit_code(reports: Iterable[CheckReport]) -> int:
    return 1 if any(r.status == FAIL for r in reports) else 0


def to_json(reports: list[CheckReport], config: dict | None = None, timing: bool = True) -> str:
    checks = [r.to_dict() for r in reports]
    if not timing:
        for c in checks:
            c.pop("ms")
    doc = {"version": VERSION, "config": config or {}, "checks": checks, "summary": summarize(reports)}
    return json.dumps(doc, indent=2, ensure_ascii=False, default=str) + "\n"


def parse_json(text: str) -> tuple[dict, list[CheckReport]]:
    doc = json.loads(text)
    if doc.get("version") != VERSION:
        raise PKVError(f"unsupported report version {doc.get('version')!r}")
    return doc.get("config", {}), [CheckReport.from_dict(c) for c in doc.get("checks", [])]


def _witness_text(w: Any) -> str:
    if w is None:
        return ""
    return w if isinstance(w, str) else json.dumps(w, ensure_ascii=False, default=str)


def to_text(reports: list[CheckReport]) -> str:
    width = max((len(r.name) for r in reports), default=0)
    lines = []
    for r in reports:
        line = f"{r.status.upper():<14} {r.name:<{width}}  [{r.anchor}]  {r.ms:.1f} ms"
        if r.witness is not None:
            line += f"  {_witness_text(r.witness)}"
        lines.append(line)
    s = summarize(reports)
    lines.append(f"summary: {s['pass']} pass, {s['fail']} fail, {s['skipped']} skipped")
    return "\n".join(lines) + "\n"


def emit_report(reports: list[CheckReport], fmt: str = "text", out: TextIO | str | None = None,
                config: dict | None = None) -> int:
    """Write the report and return the exit code (0 iff nothing failed)."""
    if fmt == "json":
        body = to_json(reports, config)
    elif fmt == "text":
        body = to_text(reports)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if out is None:
        sys.stdout.write(body)
    elif isinstance(out, str):
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(body)
        except OSError as exc:
            raise PKVError(f"cannot write report to {out}: {exc}") from None
    else:
        out.write(body)
    return exit_code(reports)
