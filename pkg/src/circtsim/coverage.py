"""Coverage of the op-dispatch table: operations evaluated and error paths hit."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field


@dataclass
class CoverageRecorder:
    hits: Counter = field(default_factory=Counter)
    errors: Counter = field(default_factory=Counter)

    def hit(self, op: str) -> None:
        self.hits[op] += 1

    def error(self, op: str, kind: str) -> None:
        self.errors[(op, kind)] += 1

    def merge(self, other: CoverageRecorder) -> None:
        self.hits.update(other.hits)
        self.errors.update(other.errors)


@dataclass
class CoverageReport:
    ops_total: int
    ops_hit: int
    errors_total: int
    errors_hit: int
    missing_ops: list[str]
    missing_errors: list[tuple[str, str]]

    @property
    def percent(self) -> float:
        total = self.ops_total + self.errors_total
        if total == 0:
            return 100.0
        return 100.0 * (self.ops_hit + self.errors_hit) / total

    def render(self) -> str:
        lines = [f"operations: {self.ops_hit}/{self.ops_total}",
                 f"error paths: {self.errors_hit}/{self.errors_total}",
                 f"coverage: {self.percent:.1f}%"]
        lines += [f"  missing op {n}" for n in self.missing_ops]
        lines += [f"  missing error {n}: {k}" for n, k in self.missing_errors]
        return "\n".join(lines)


def report(registry, recorder: CoverageRecorder) -> CoverageReport:
    missing_ops = sorted(n for n, d in registry.items()
                         if d.evaluates and recorder.hits[n] == 0)
    missing_errors = sorted((n, k) for n, d in registry.items()
                            for k in d.errors if recorder.errors[(n, k)] == 0)
    ops_total = sum(1 for d in registry.values() if d.evaluates)
    errors_total = sum(len(d.errors) for d in registry.values())
    return CoverageReport(ops_total, ops_total - len(missing_ops),
                          errors_total, errors_total - len(missing_errors),
                          missing_ops, missing_errors)
