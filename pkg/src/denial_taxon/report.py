"""Per-window reports in text and JSON-lines form."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Iterable

from .features import EvaluatedWindow
from .lattice import nearest_classes
from .taxonomy import ConditionId, OutcomeKind, classify, required_conditions, venn_region

REPORT_KEYS = (
    "target", "window_start_ms", "window_end_ms", "conditions", "outcome",
    "classes", "venn", "nearest", "explanation",
)


@dataclass(frozen=True)
class WindowReport:
    target: str
    window_start_ms: int
    window_end_ms: int
    conditions: str
    outcome: str
    classes: tuple[str, ...]
    venn: tuple[str, ...]
    nearest: tuple[tuple[str, int], ...]
    explanation: tuple[str, ...]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["classes"] = list(self.classes)
        d["venn"] = list(self.venn)
        d["nearest"] = [[name, dist] for name, dist in self.nearest]
        d["explanation"] = list(self.explanation)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "WindowReport":
        if tuple(d) != REPORT_KEYS:
            raise ValueError(f"report keys {list(d)} differ from {list(REPORT_KEYS)}")
        return cls(
            target=d["target"],
            window_start_ms=d["window_start_ms"],
            window_end_ms=d["window_end_ms"],
            conditions=d["conditions"],
            outcome=d["outcome"],
            classes=tuple(d["classes"]),
            venn=tuple(d["venn"]),
            nearest=tuple((name, dist) for name, dist in d["nearest"]),
            explanation=tuple(d["explanation"]),
        )

    @classmethod
    def from_json(cls, line: str) -> "WindowReport":
        return cls.from_dict(json.loads(line))

    def to_text(self) -> str:
        lines = [
            f"[{self.target}] window {self.window_start_ms}..{self.window_end_ms}",
            f"  conditions: {self.conditions or '(none)'}",
            f"  outcome: {self.outcome}",
            f"  classes: {', '.join(self.classes) or '-'}",
            f"  venn: {', '.join(self.venn) or '-'}",
            f"  nearest: {', '.join(f'{n} ({d})' for n, d in self.nearest) or '-'}",
        ]
        lines.extend(f"    {x}" for x in self.explanation)
        return "\n".join(lines)


def nearest_if_inexact(result) -> tuple[tuple[str, int], ...]:
    """Nearest classes for attack windows no class describes exactly."""
    if result.outcome_kind is OutcomeKind.NO_ATTACK or result.exact:
        return ()
    return tuple((c.value, d) for c, d in nearest_classes(result.observed))


def build_report(ew: EvaluatedWindow) -> WindowReport:
    result = classify(ew.conditions)
    venn = []
    for c in result.matched:
        region = venn_region(c).value
        if region not in venn:
            venn.append(region)
    f = ew.features
    explanation = (
        f"features: malicious_pkts={f.malicious_pkts} benign_pkts={f.benign_pkts} "
        f"distinct_malicious_sources={f.distinct_malicious_sources} "
        f"baseline_pkts={'none' if f.baseline_pkts is None else f.baseline_pkts} infra={f.infra}",
        *ew.explanation,
        # classify() opens with one line per condition; the evaluator's lines replace them
        *result.explanation[len(ConditionId):],
    )
    return WindowReport(
        target=f.target_id,
        window_start_ms=f.window_start_ms,
        window_end_ms=f.window_end_ms,
        conditions=ew.conditions.text,
        outcome=result.outcome_kind.value,
        classes=tuple(c.value for c in result.matched),
        venn=tuple(venn),
        nearest=nearest_if_inexact(result),
        explanation=explanation,
    )


def target_summary(reports: Iterable[WindowReport]) -> list[str]:
    """Majority class per target across its attack windows."""
    by_target: dict[str, Counter] = {}
    totals: Counter = Counter()
    for r in reports:
        totals[r.target] += 1
        counter = by_target.setdefault(r.target, Counter())
        if r.outcome != OutcomeKind.NO_ATTACK.value:
            counter["+".join(r.classes) or r.outcome] += 1
    lines = []
    for target in sorted(totals):
        counter = by_target[target]
        attack_windows = sum(counter.values())
        if not attack_windows:
            lines.append(f"{target}: no attack in {totals[target]} window(s)")
            continue
        # ties resolve alphabetically so the summary is stable
        label, count = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        lines.append(f"{target}: {label} in {count}/{attack_windows} attack window(s) of {totals[target]}")
    return lines


def describe_class(cls) -> str:
    return f"{cls}: requires {required_conditions(cls).text}; region {venn_region(cls)}"
