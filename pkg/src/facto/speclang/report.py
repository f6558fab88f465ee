"""Command reports and their text and JSON renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..report import ValidationReport

VERDICTS = ("pass", "fail", "not-applicable", "hypothesis-failed")
EXIT_CODES = {"pass": 0, "fail": 1, "hypothesis-failed": 2, "not-applicable": 2}


@dataclass
class Report:
    command: list[str]
    document: str = ""
    verdict: str = "pass"
    witnesses: list[dict] = field(default_factory=list)
    window: str = ""
    timing_ms: int | None = None
    checks: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    hypothesis: str | None = None
    hypothesis_witness: str | None = None
    result: Any = None
    n_violations: int = 0

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def absorb(self, rep: ValidationReport, prefix: str = "") -> None:
        """Fold a module report into this one (verdict, checks, notes, witnesses)."""
        for v in rep.violations:
            self.witnesses.append({"law": prefix + v.law, "names": [str(x) for x in v.witness],
                                   "detail": v.detail})
        self.n_violations += rep.n_violations
        for k, v in rep.checks.items():
            self.checks[prefix + k] = v
        for n in rep.notes:
            if n not in self.notes:
                self.notes.append(n)
        if rep.hypothesis and not self.hypothesis:
            self.hypothesis = rep.hypothesis
            self.hypothesis_witness = rep.hypothesis_witness
        self.settle()

    def settle(self) -> None:
        if self.hypothesis is not None:
            self.verdict = "hypothesis-failed"
        elif self.verdict != "not-applicable":
            self.verdict = "fail" if (self.n_violations or self.witnesses) else "pass"

    def as_dict(self) -> dict:
        return {"command": list(self.command), "document": self.document, "verdict": self.verdict,
                "witnesses": self.witnesses, "window": self.window, "timing_ms": self.timing_ms,
                "checks": self.checks, "notes": self.notes, "hypothesis": self.hypothesis,
                "hypothesis_witness": self.hypothesis_witness, "result": self.result,
                "n_violations": self.n_violations}

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        r = cls(command=list(d.get("command", [])))
        for k in cls.__dataclass_fields__:
            if d.get(k) is not None:
                setattr(r, k, d[k])
        return r


def _plain(x):
    """Convert numpy scalars, tuples and sets into JSON-friendly values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(v) for v in x)
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if x is None or isinstance(x, (str, int, float, bool)):
        return x
    return str(x)


def to_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _text(r: Report) -> list[str]:
    lines = [f"$ facto {' '.join(r.command)}", f"verdict: {r.verdict}"]
    if r.window:
        lines.append(f"window: {r.window}")
    if r.hypothesis:
        w = f" (witness {r.hypothesis_witness})" if r.hypothesis_witness else ""
        lines.append(f"hypothesis failed: {r.hypothesis}{w}")
    for k, v in r.checks.items():
        lines.append(f"  check {k}: {_plain(v)}")
    for w in r.witnesses:
        names = " ".join(w.get("names", []))
        ids = w.get("ids")
        s = f"  witness {w['law']}: {names}"
        if ids:
            s += f" [ids {' '.join(str(i) for i in ids)}]"
        if w.get("fillers") is not None:
            s += f" ({w.get('filler_status')}: (s,t) = {w['fillers']})"
        if w.get("detail"):
            s += f" -- {w['detail']}"
        lines.append(s)
    if r.n_violations > len(r.witnesses):
        lines.append(f"  ... {r.n_violations - len(r.witnesses)} more violations")
    if r.result is not None:
        lines.append("result: " + json.dumps(_plain(r.result), sort_keys=True, ensure_ascii=False))
    for n in r.notes:
        lines.append(f"  note: {n}")
    if r.timing_ms is not None:
        lines.append(f"timing: {r.timing_ms} ms")
    return lines


def emit_report(report: Report | list[Report], fmt: str = "json") -> bytes:
    """Render one report (or a list, for the corpus run) as JSON or human text."""
    many = isinstance(report, list)
    if fmt == "json":
        body = {"reports": [r.as_dict() for r in report]} if many else report.as_dict()
        return to_json(body).encode("utf-8")
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    reps = report if many else [report]
    return ("\n\n".join("\n".join(_text(r)) for r in reps) + "\n").encode("utf-8")
