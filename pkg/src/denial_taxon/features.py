"""Tumbling-window aggregation of flow records and evaluation of C0..C5."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .ingest import FlowRecord, Infra, TargetProfile
from .taxonomy import ConditionId, ConditionVector

C0, C1, C2, C3, C4, C5 = ConditionId


class ThresholdError(ValueError):
    pass


class WindowingError(ValueError):
    pass


@dataclass(frozen=True)
class Thresholds:
    low_rate_packet_limit: int = 1000
    low_rate_fraction: float = 0.20
    window_secs: int = 60
    baseline_trailing_windows: int = 10

    def __post_init__(self):
        if not isinstance(self.low_rate_packet_limit, int) or self.low_rate_packet_limit <= 0:
            raise ThresholdError(f"low_rate_packet_limit must be a positive integer, got {self.low_rate_packet_limit!r}")
        if not 0 < self.low_rate_fraction <= 1:
            raise ThresholdError(f"low_rate_fraction must be in (0, 1], got {self.low_rate_fraction!r}")
        if not isinstance(self.window_secs, int) or self.window_secs <= 0:
            raise ThresholdError(f"window_secs must be a positive integer, got {self.window_secs!r}")
        if not isinstance(self.baseline_trailing_windows, int) or self.baseline_trailing_windows <= 0:
            raise ThresholdError(
                f"baseline_trailing_windows must be a positive integer, got {self.baseline_trailing_windows!r}"
            )

    @property
    def window_ms(self) -> int:
        return self.window_secs * 1000

    @property
    def fraction_exact(self) -> Fraction:
        # str() first so 0.2 means 1/5, not the nearest binary double
        return Fraction(str(self.low_rate_fraction))

    @classmethod
    def from_mapping(cls, data: dict, base: "Thresholds | None" = None) -> "Thresholds":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ThresholdError(f"unknown threshold keys: {', '.join(sorted(unknown))}")
        return replace(base or cls(), **data)

    @classmethod
    def from_file(cls, path: str | Path) -> "Thresholds":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ThresholdError(f"cannot load thresholds from {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ThresholdError("thresholds file must hold a JSON object")
        return cls.from_mapping(data)


@dataclass(frozen=True)
class WindowFeatures:
    target_id: str
    window_start_ms: int
    window_end_ms: int
    malicious_pkts: int
    benign_pkts: int
    distinct_malicious_sources: int
    infra: Infra
    baseline_pkts: int | None = None
    malicious_records: int = 0


@dataclass
class WindowAccumulator:
    """Mutable running totals for one (target, window); mergeable."""

    target_id: str
    window_start_ms: int
    window_end_ms: int
    infra: Infra
    malicious_pkts: int = 0
    benign_pkts: int = 0
    malicious_records: int = 0
    malicious_sources: set = field(default_factory=set)

    def add(self, r: FlowRecord) -> None:
        if r.malicious:
            self.malicious_pkts += r.pkts
            self.malicious_records += 1
            self.malicious_sources.add(r.src)
        else:
            self.benign_pkts += r.pkts

    def merge(self, other: "WindowAccumulator") -> "WindowAccumulator":
        if (self.target_id, self.window_start_ms) != (other.target_id, other.window_start_ms):
            raise WindowingError("can only merge accumulators of the same target window")
        return WindowAccumulator(
            self.target_id, self.window_start_ms, self.window_end_ms, self.infra,
            self.malicious_pkts + other.malicious_pkts,
            self.benign_pkts + other.benign_pkts,
            self.malicious_records + other.malicious_records,
            self.malicious_sources | other.malicious_sources,
        )

    def freeze(self) -> WindowFeatures:
        return WindowFeatures(
            target_id=self.target_id,
            window_start_ms=self.window_start_ms,
            window_end_ms=self.window_end_ms,
            malicious_pkts=self.malicious_pkts,
            benign_pkts=self.benign_pkts,
            distinct_malicious_sources=len(self.malicious_sources),
            infra=self.infra,
            malicious_records=self.malicious_records,
        )


def window_start(ts_ms: int, t: Thresholds) -> int:
    return ts_ms - ts_ms % t.window_ms


def accumulate(records: Iterable[FlowRecord], profiles: dict[str, TargetProfile],
               t: Thresholds) -> dict[tuple[str, int], WindowAccumulator]:
    windows: dict[tuple[str, int], WindowAccumulator] = {}
    last_ts = None
    for i, r in enumerate(records):
        if last_ts is not None and r.ts_ms < last_ts:
            raise WindowingError(f"records not sorted by ts_ms: record {i} at {r.ts_ms} follows {last_ts}")
        last_ts = r.ts_ms
        profile = profiles.get(r.dst)
        if profile is None:
            raise WindowingError(f"no target profile for dst {r.dst!r}")
        start = window_start(r.ts_ms, t)
        key = (r.dst, start)
        acc = windows.get(key)
        if acc is None:
            acc = windows[key] = WindowAccumulator(r.dst, start, start + t.window_ms, profile.infra)
        acc.add(r)
    return windows


def window_stream(records: Iterable[FlowRecord], profiles: dict[str, TargetProfile],
                  t: Thresholds = Thresholds()) -> list[WindowFeatures]:
    """Per-(target, window) features for every window holding at least one record,
    ordered by target id then window start."""
    windows = accumulate(records, profiles, t)
    return [windows[k].freeze() for k in sorted(windows)]


def _round_half_away(x: Fraction) -> int:
    n = int(abs(x) + Fraction(1, 2))
    return n if x >= 0 else -n


def estimate_baseline(history: Sequence[WindowFeatures], profile: TargetProfile,
                      t: Thresholds = Thresholds()) -> int | None:
    if profile.baseline_pkts_per_window is not None:
        return profile.baseline_pkts_per_window
    recent = list(history)[-t.baseline_trailing_windows:]
    if not recent:
        return None
    return _round_half_away(Fraction(sum(w.benign_pkts for w in recent), len(recent)))


def evaluate_conditions(w: WindowFeatures, baseline: int | None,
                        t: Thresholds = Thresholds()) -> tuple[ConditionVector, list[str]]:
    present = set()
    lines = []

    c0 = w.malicious_pkts > 0
    lines.append(f"C0 {'true' if c0 else 'false'}: malicious_pkts {w.malicious_pkts} > 0")
    if c0:
        present.add(C0)

    n = w.distinct_malicious_sources
    c1 = c0 and n == 1
    c2 = c0 and n > 1
    lines.append(f"C1 {'true' if c1 else 'false'}: distinct_malicious_sources {n} == 1")
    lines.append(f"C2 {'true' if c2 else 'false'}: distinct_malicious_sources {n} > 1")
    if c1:
        present.add(C1)
    if c2:
        present.add(C2)

    by_count = w.malicious_pkts < t.low_rate_packet_limit
    if baseline is not None and baseline > 0:
        ratio = Fraction(w.malicious_pkts, baseline)
        by_fraction = ratio <= t.fraction_exact
        fraction_text = (
            f"malicious_pkts/baseline {w.malicious_pkts}/{baseline} = {float(ratio):.4f} "
            f"<= {t.low_rate_fraction} is {str(by_fraction).lower()}"
        )
    else:
        by_fraction = False
        fraction_text = "fraction test skipped (no positive baseline)"
    c3 = c0 and (by_count or by_fraction)
    lines.append(
        f"C3 {'true' if c3 else 'false'}: malicious_pkts {w.malicious_pkts} < "
        f"{t.low_rate_packet_limit} is {str(by_count).lower()}; {fraction_text}"
    )
    if c3:
        present.add(C3)

    c4 = c0 and w.infra.cloud_scalable
    c5 = c0 and w.infra is Infra.SERVERLESS
    lines.append(f"C4 {'true' if c4 else 'false'}: infra {w.infra} in {{cloud_scalable, serverless}}")
    lines.append(f"C5 {'true' if c5 else 'false'}: infra {w.infra} == serverless")
    if c4:
        present.add(C4)
    if c5:
        present.add(C5)

    return ConditionVector(frozenset(present)), lines


@dataclass(frozen=True)
class EvaluatedWindow:
    features: WindowFeatures
    conditions: ConditionVector
    explanation: tuple[str, ...]


def evaluate_stream(records: Iterable[FlowRecord], profiles: dict[str, TargetProfile],
                    t: Thresholds = Thresholds()) -> Iterator[EvaluatedWindow]:
    """Window the records, attach each window's baseline from the windows before it,
    and evaluate conditions."""
    history: dict[str, list[WindowFeatures]] = {}
    for w in window_stream(records, profiles, t):
        prior = history.setdefault(w.target_id, [])
        baseline = estimate_baseline(prior, profiles[w.target_id], t)
        w = replace(w, baseline_pkts=baseline)
        vector, lines = evaluate_conditions(w, baseline, t)
        prior.append(w)
        yield EvaluatedWindow(w, vector, tuple(lines))
