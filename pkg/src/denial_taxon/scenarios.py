"""Deterministic labelled flow streams for the four case-study attacks plus a custom one.

Preset volumes are synthetic stand-ins chosen so every attack window lands on
the intended side of each default threshold with a wide margin.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from pathlib import Path

from .features import Thresholds
from .ingest import FlowRecord, Infra, TargetProfile, dump_target_profiles, write_flows_jsonl
from .taxonomy import AttackClass, ConditionId, ConditionVector, OutcomeKind, classify

SCENARIO_NAMES = ("syn_flood", "mirai", "slowloris", "ddow_billing", "custom")

ATTACK_PKT_BYTES = 64
BENIGN_PKT_BYTES = 800
BENIGN_POOL = 20
MAX_RECORDS_PER_SOURCE = 3
# 2023-11-14T22:13:00Z, a multiple of 60 s
DEFAULT_START_MS = 1_699_999_980_000


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    duration_secs: int = 300
    attacker_count: int = 1
    malicious_pkts_per_src_per_window: int = 1
    benign_pkts_per_window: int = 0
    target_infra: Infra = Infra.FIXED
    seed: int = 0
    expected_class: AttackClass | None = None
    # leading windows carry only background traffic
    benign_lead_windows: int = 1
    window_secs: int = 60
    target_id: str = "victim"
    start_ms: int = DEFAULT_START_MS

    def validate(self) -> None:
        if self.name not in SCENARIO_NAMES:
            raise ScenarioError(f"unknown scenario {self.name!r}")
        if self.duration_secs <= 0:
            raise ScenarioError("duration_secs must be positive")
        if self.window_secs <= 0:
            raise ScenarioError("window_secs must be positive")
        if self.attacker_count <= 0:
            raise ScenarioError("attacker_count must be positive")
        if self.malicious_pkts_per_src_per_window <= 0:
            raise ScenarioError("malicious_pkts_per_src_per_window must be positive")
        if self.benign_pkts_per_window < 0:
            raise ScenarioError("benign_pkts_per_window must be non-negative")
        if self.benign_lead_windows < 0:
            raise ScenarioError("benign_lead_windows must be non-negative")
        if self.benign_lead_windows >= self.window_count:
            raise ScenarioError("scenario has no attack windows; lengthen duration_secs")

    @property
    def window_count(self) -> int:
        return -(-self.duration_secs // self.window_secs)

    @property
    def malicious_pkts_per_window(self) -> int:
        return self.attacker_count * self.malicious_pkts_per_src_per_window

    def predicted_conditions(self, t: Thresholds = Thresholds()) -> ConditionVector:
        """Conditions an attack window should evaluate to, assuming the background
        volume is the baseline."""
        present = {ConditionId.C0}
        present.add(ConditionId.C1 if self.attacker_count == 1 else ConditionId.C2)
        mal = self.malicious_pkts_per_window
        low = mal < t.low_rate_packet_limit
        if self.benign_pkts_per_window > 0 and self.benign_lead_windows > 0:
            low = low or mal * t.fraction_exact.denominator <= (
                t.fraction_exact.numerator * self.benign_pkts_per_window
            )
        if low:
            present.add(ConditionId.C3)
        if self.target_infra.cloud_scalable:
            present.add(ConditionId.C4)
        if self.target_infra is Infra.SERVERLESS:
            present.add(ConditionId.C5)
        return ConditionVector(frozenset(present))


PRESETS = {
    "syn_flood": ScenarioSpec(
        "syn_flood", attacker_count=1, malicious_pkts_per_src_per_window=50_000,
        benign_pkts_per_window=10_000, target_infra=Infra.FIXED, expected_class=AttackClass.DOS,
    ),
    "mirai": ScenarioSpec(
        "mirai", attacker_count=500, malicious_pkts_per_src_per_window=200,
        benign_pkts_per_window=10_000, target_infra=Infra.FIXED, expected_class=AttackClass.DDOS,
    ),
    "slowloris": ScenarioSpec(
        "slowloris", attacker_count=1, malicious_pkts_per_src_per_window=200,
        benign_pkts_per_window=10_000, target_infra=Infra.FIXED, expected_class=AttackClass.LDOS,
    ),
    "ddow_billing": ScenarioSpec(
        "ddow_billing", attacker_count=300, malicious_pkts_per_src_per_window=2,
        benign_pkts_per_window=50_000, target_infra=Infra.SERVERLESS, expected_class=AttackClass.DDOW,
    ),
}


def preset(name: str, seed: int = 0) -> ScenarioSpec:
    key = name.replace("-", "_")
    if key not in PRESETS:
        raise ScenarioError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    return replace(PRESETS[key], seed=seed)


def custom(**params) -> ScenarioSpec:
    """Custom scenario; the expected class follows from the predicted conditions."""
    spec = ScenarioSpec("custom", **params)
    spec.validate()
    if spec.expected_class is None:
        result = classify(spec.predicted_conditions())
        if result.outcome_kind is OutcomeKind.CLASSIFIED:
            spec = replace(spec, expected_class=result.matched[0])
    return spec


def _split(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def attacker_address(i: int) -> str:
    return f"10.66.{i // 256}.{i % 256}"


def benign_address(i: int) -> str:
    return f"192.168.1.{i + 10}"


def generate(spec: ScenarioSpec) -> tuple[list[FlowRecord], dict[str, TargetProfile], AttackClass | None]:
    spec.validate()
    rng = random.Random(spec.seed)
    window_ms = spec.window_secs * 1000
    origin = spec.start_ms - spec.start_ms % window_ms
    records = []
    for w in range(spec.window_count):
        start = origin + w * window_ms
        end = min(start + window_ms, origin + spec.duration_secs * 1000)

        if spec.benign_pkts_per_window:
            pool = min(BENIGN_POOL, spec.benign_pkts_per_window)
            for i, pkts in enumerate(_split(spec.benign_pkts_per_window, pool)):
                records.append(FlowRecord(
                    rng.randrange(start, end), benign_address(i), spec.target_id,
                    pkts, pkts * BENIGN_PKT_BYTES, False,
                ))

        if w < spec.benign_lead_windows:
            continue
        per_src = spec.malicious_pkts_per_src_per_window
        chunks = min(per_src, MAX_RECORDS_PER_SOURCE)
        for a in range(spec.attacker_count):
            for pkts in _split(per_src, chunks):
                records.append(FlowRecord(
                    rng.randrange(start, end), attacker_address(a), spec.target_id,
                    pkts, pkts * ATTACK_PKT_BYTES, True,
                ))

    records.sort(key=lambda r: (r.ts_ms, r.malicious, r.src, r.pkts))
    profiles = {spec.target_id: TargetProfile(spec.target_id, spec.target_infra)}
    return records, profiles, spec.expected_class


def write_scenario(spec: ScenarioSpec, prefix: str | Path) -> list[Path]:
    """Write ``<prefix>.flows.jsonl``, ``<prefix>.targets.json`` and ``<prefix>.expected``."""
    records, profiles, expected = generate(spec)
    prefix = str(prefix)
    flows_path = Path(prefix + ".flows.jsonl")
    targets_path = Path(prefix + ".targets.json")
    expected_path = Path(prefix + ".expected")
    with open(flows_path, "w", encoding="utf-8", newline="\n") as fh:
        write_flows_jsonl(records, fh)
    targets_path.write_text(dump_target_profiles(profiles), encoding="utf-8")
    expected_path.write_text(f"{expected.value if expected else 'unknown'}\n", encoding="utf-8")
    return [flows_path, targets_path, expected_path]
