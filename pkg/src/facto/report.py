"""Validation reports shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Violation:
    law: str
    witness: tuple = ()
    detail: str = ""

    def __str__(self) -> str:
        w = " ".join(str(x) for x in self.witness)
        s = f"{self.law} at {w}" if w else self.law
        return f"{s}: {self.detail}" if self.detail else s

    def as_dict(self) -> dict:
        return {"law": self.law, "witness": [str(x) for x in self.witness], "detail": self.detail}


@dataclass
class ValidationReport:
    """Outcome of a check.

    ``violations`` lists counterexamples, ``checks`` records named sub-results
    and ``notes`` carries truncation or window remarks.  A report with a
    ``hypothesis`` entry means the check was not applicable.
    """

    subject: str = ""
    violations: list[Violation] = field(default_factory=list)
    checks: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    hypothesis: str | None = None
    hypothesis_witness: str | None = None
    max_witnesses: int = 50
    n_violations: int = 0

    def add(self, law: str, *witness, detail: str = "") -> None:
        self.n_violations += 1
        if len(self.violations) < self.max_witnesses:
            self.violations.append(Violation(law, tuple(witness), detail))

    def check(self, name: str, value) -> Any:
        self.checks[name] = value
        return value

    def note(self, text: str) -> None:
        if text not in self.notes:
            self.notes.append(text)

    def fail_hypothesis(self, which: str, witness=None) -> None:
        self.hypothesis = which
        self.hypothesis_witness = None if witness is None else str(witness)

    def merge(self, other: "ValidationReport", prefix: str = "") -> None:
        for v in other.violations:
            self.add(prefix + v.law, *v.witness, detail=v.detail)
        self.n_violations += other.n_violations - len(other.violations)
        for k, v in other.checks.items():
            self.checks[prefix + k] = v
        for n in other.notes:
            self.note(n)
        if other.hypothesis and not self.hypothesis:
            self.hypothesis = prefix + other.hypothesis
            self.hypothesis_witness = other.hypothesis_witness

    @property
    def ok(self) -> bool:
        return self.hypothesis is None and self.n_violations == 0

    @property
    def verdict(self) -> str:
        if self.hypothesis is not None:
            return "hypothesis-failed"
        return "pass" if self.n_violations == 0 else "fail"

    def laws(self) -> set[str]:
        return {v.law for v in self.violations}

    def __str__(self) -> str:
        lines = [f"{self.subject or 'check'}: {self.verdict}"]
        if self.hypothesis:
            w = f" (witness {self.hypothesis_witness})" if self.hypothesis_witness else ""
            lines.append(f"  hypothesis failed: {self.hypothesis}{w}")
        for v in self.violations:
            lines.append(f"  violation: {v}")
        if self.n_violations > len(self.violations):
            lines.append(f"  ... {self.n_violations - len(self.violations)} more")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)
