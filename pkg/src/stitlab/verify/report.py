"""Check records and suite reports.

Every record carries the numbers its verdict was computed from, and
:meth:`CheckRecord.audit` recomputes the verdict from those numbers alone.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional


@dataclass
class CheckRecord:
    suite: str
    check: str
    kind: str  # "proportion" | "two_sample" | "goodness_of_fit" | "exact" | "trend" | "bound"
    target: str
    reference: Optional[float] = None  # closed-form value, if any
    estimate: Optional[float] = None
    stderr: Optional[float] = None
    band: Optional[tuple] = None  # acceptance band for the estimate
    p_value: Optional[float] = None
    alpha: Optional[float] = None
    n: Optional[int] = None
    failures: Optional[int] = None
    verdict: bool = False
    details: dict = field(default_factory=dict)

    def audit(self) -> bool:
        """Recompute the verdict from the recorded numbers."""
        if self.kind in ("proportion", "bound"):
            lo, hi = self.band
            return lo <= self.estimate <= hi
        if self.kind in ("two_sample", "goodness_of_fit"):
            return self.p_value > self.alpha
        if self.kind == "exact":
            return self.failures == 0
        if self.kind == "trend":
            return all(step["increase"] <= step["allowance"] for step in self.details["steps"])
        raise ValueError(f"unknown check kind {self.kind!r}")

    def line(self) -> str:
        status = "PASS" if self.verdict else "FAIL"
        if self.kind in ("proportion", "bound"):
            body = f"estimate={self.estimate:.6g} band=[{self.band[0]:.6g}, {self.band[1]:.6g}]"
            if self.reference is not None:
                body = f"target={self.reference:.6g} " + body
        elif self.kind in ("two_sample", "goodness_of_fit"):
            body = f"p={self.p_value:.4g} alpha={self.alpha:g}"
        elif self.kind == "exact":
            body = f"failures={self.failures}/{self.n}"
        else:
            body = "steps=" + ",".join(f"{s['increase']:+.4f}<={s['allowance']:.4f}" for s in self.details["steps"])
        n = f" n={self.n}" if self.n is not None else ""
        return f"[{status}] {self.suite}.{self.check}: {body}{n}"

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["band"] is not None:
            d["band"] = list(d["band"])
        return d


@dataclass
class TestReport:
    __test__ = False  # not a pytest class

    suite: str
    seed: Optional[int]
    records: list = field(default_factory=list)
    wall_time: float = 0.0
    fresh_seed: bool = False
    config: dict = field(default_factory=dict)
    # seconds spent since the previous record was added, by check name
    timings: dict = field(default_factory=dict)

    def add(self, record: CheckRecord) -> CheckRecord:
        record.suite = self.suite
        self.records.append(record)
        return record

    @property
    def passed(self) -> bool:
        return bool(self.records) and all(r.verdict for r in self.records)

    def audit(self) -> bool:
        return all(r.audit() == r.verdict for r in self.records)

    def record(self, check: str) -> CheckRecord:
        for r in self.records:
            if r.check == check:
                return r
        raise KeyError(check)

    def text(self) -> str:
        head = f"suite {self.suite} seed={self.seed} checks={len(self.records)} wall={self.wall_time:.1f}s"
        lines = [head] + [r.line() for r in self.records]
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "fresh_seed": self.fresh_seed,
            "wall_time": self.wall_time,
            "timings": dict(self.timings),
            "config": self.config,
            "passed": self.passed,
            "records": [r.to_dict() for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_jsonable)


def _jsonable(x):
    if hasattr(x, "item"):
        return x.item()
    if isinstance(x, tuple):
        return list(x)
    return str(x)
