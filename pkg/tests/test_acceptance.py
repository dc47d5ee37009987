"""Exit criteria: exact reproduction of the class table, case studies and lattice."""

import itertools
import random
import time

import oracles
from conftest import ACCEPTANCE_RESULTS
from denial_taxon.features import Thresholds, WindowFeatures, evaluate_conditions, evaluate_stream
from denial_taxon.ingest import FlowRecord, Infra, TargetProfile, parse_flows, write_flows_jsonl
from denial_taxon.lattice import build_lattice
from denial_taxon.report import build_report
from denial_taxon.scenarios import generate, preset
from denial_taxon.taxonomy import (
    ALL_VECTORS,
    AttackClass,
    OutcomeKind,
    classify,
    is_consistent,
    required_conditions,
    vector_from_names,
)

CASE_STUDIES = [
    # preset, class, vector
    ("syn_flood", AttackClass.DOS, "C0,C1"),
    ("ddow_billing", AttackClass.DDOW, "C0,C2,C3,C4,C5"),
    ("mirai", AttackClass.DDOS, "C0,C2"),
    ("slowloris", AttackClass.LDOS, "C0,C1,C3"),
]
RANDOM_WINDOWS = 10_000


def record(number, ok, line):
    ACCEPTANCE_RESULTS[number] = (ok, line)
    print(f"[{'PASS' if ok else 'FAIL'}] {number}. {line}")
    assert ok, line


def run_case_studies(seed=11):
    """generate -> JSONL -> parse -> window -> evaluate -> classify, per preset."""
    out = {}
    for name, _, _ in CASE_STUDIES:
        flows, profiles, expected = generate(preset(name, seed))
        lines = []

        class Sink:
            def write(self, s):
                lines.append(s)

        write_flows_jsonl(flows, Sink())
        parsed = parse_flows("".join(lines).splitlines())
        reports = [build_report(ew) for ew in evaluate_stream(parsed, profiles)]
        out[name] = (expected, reports)
    return out


def run_random_windows(seed=2024, n=RANDOM_WINDOWS):
    """Evaluate ``n`` randomized windows built from random flow records."""
    rng = random.Random(seed)
    targets = [f"t{i}" for i in range(20)]
    profiles = {t: TargetProfile(t, rng.choice(list(Infra)),
                                 rng.choice([None, rng.randrange(0, 20_000)])) for t in targets}
    records = []
    per_target = n // len(targets)
    for w in range(per_target):
        start = w * 60_000
        for t in targets:
            for _ in range(rng.randrange(1, 5)):
                records.append(FlowRecord(
                    start + rng.randrange(60_000),
                    f"s{rng.randrange(rng.choice([1, 3, 50]))}",
                    t,
                    rng.choice([0, rng.randrange(1, 3000), rng.randrange(1, 100_000)]),
                    rng.randrange(10**6),
                    rng.random() < 0.6,
                ))
    records.sort(key=lambda r: (r.ts_ms, r.dst, r.src))
    windows = list(evaluate_stream(records, profiles))
    return windows, [build_report(ew).to_json() for ew in windows]


def test_01_table_reproduction():
    started = time.perf_counter()
    passed = 0
    for cls in AttackClass:
        r = classify(required_conditions(cls))
        passed += r.outcome_kind is OutcomeKind.CLASSIFIED and r.matched == (cls,)
    elapsed = time.perf_counter() - started
    record(1, passed == 7 and elapsed < 1.0,
           f"class table round-trip {passed}/7 in {elapsed:.3f}s (limit 1s)")


def test_02_case_study_end_to_end():
    started = time.perf_counter()
    results = run_case_studies()
    elapsed = time.perf_counter() - started
    failures = []
    counts = []
    for name, cls, _ in CASE_STUDIES:
        expected, reports = results[name]
        attack = [r for r in reports if "C0" in r.conditions.split(",")]
        benign = [r for r in reports if r not in attack]
        if expected is not cls:
            failures.append(f"{name}: preset expects {expected}")
        failures += [f"{name}@{r.window_start_ms}: {r.outcome} {r.classes}" for r in attack
                     if r.outcome != "Classified" or r.classes != (cls.value,)]
        failures += [f"{name}@{r.window_start_ms}: benign window {r.outcome}" for r in benign
                     if r.outcome != "NoAttack"]
        if not attack or not benign:
            failures.append(f"{name}: needs both attack and benign windows")
        counts.append(f"{name}->{cls} {len(attack)} attack/{len(benign)} benign")
    ok = not failures and elapsed < 10.0
    record(2, ok, f"presets {'; '.join(counts)}; {elapsed:.2f}s (limit 10s)"
           + (f"; failures: {failures[:5]}" if failures else ""))


def test_03_case_study_vectors():
    results = run_case_studies()
    mismatches = []
    for name, _, vector in CASE_STUDIES:
        _, reports = results[name]
        seen = {r.conditions for r in reports if r.conditions}
        if seen != {vector_from_names(vector).text}:
            mismatches.append(f"{name}: {sorted(seen)} != {vector}")
    record(3, not mismatches,
           "evaluated vectors equal case-study sets exactly" + (f": {mismatches}" if mismatches else ""))


def test_04_oracle_equivalence():
    agree = 0
    for v in ALL_VECTORS:
        r = classify(v)
        outcome, classes = oracles.brute_force_classify({c.name for c in v})
        agree += r.outcome_kind.value == outcome and [c.value for c in r.matched] == classes
    record(4, agree == 64, f"classifier vs brute-force oracle {agree}/64")


def test_05_lattice_structure():
    started = time.perf_counter()
    lat = build_lattice()
    up = oracles.reachable_up(oracles.figure_covers())
    ids = [n.id for n in lat.nodes]
    problems = []
    if len(ids) != 11:
        problems.append(f"{len(ids)} nodes")
    if set(lat.covers) != oracles.figure_covers() or len(lat.covers) != 17:
        problems.append("cover edges differ from figure transcription")
    pairs = 0
    for a, b in itertools.product(ids, repeat=2):
        meets, joins = oracles.brute_meet(up, a, b), oracles.brute_join(up, a, b)
        if len(meets) == 1 and len(joins) == 1 and lat.meet(a, b) == meets[0] and lat.join(a, b) == joins[0]:
            pairs += 1
        if lat.meet(a, lat.join(a, b)) != a or lat.join(a, lat.meet(a, b)) != a:
            problems.append(f"absorption fails for {a},{b}")
        if lat.leq(a, b) != (lat.node(a).condition_set >= lat.node(b).condition_set):
            problems.append(f"order disagrees with condition sets for {a},{b}")
    anchored = [
        (lat.join("LDoS", "LDDoS"), "C3"),
        (lat.join("DoW", "DDoW"), "C5"),
        (lat.meet("C1", "C3"), "LDoS"),
        (lat.meet("C2", "C3"), "LDDoS"),
        (lat.meet("C1", "C5"), "DoW"),
        (lat.meet("C2", "C5"), "DDoW"),
    ]
    problems += [f"query gave {got}, expected {want}" for got, want in anchored if got != want]
    elapsed = time.perf_counter() - started
    ok = not problems and pairs == 121 and elapsed < 1.0
    record(5, ok, f"11 nodes/17 covers; {pairs}/121 pairs with unique meet and join; "
                  f"anchored queries {len(anchored)}; {elapsed:.3f}s (limit 1s)"
                  + (f"; problems: {problems[:5]}" if problems else ""))


def test_06_low_rate_boundaries():
    t = Thresholds()

    def c3(mal, baseline):
        w = WindowFeatures("t", 0, 60_000, mal, 0, 1, Infra.FIXED, malicious_records=1)
        return "C3" in evaluate_conditions(w, baseline, t)[0].text.split(",")

    checks = [
        ("999 pkts, no baseline", c3(999, None), True),
        ("1000 pkts, no baseline", c3(1000, None), False),
        ("2000/10000 = 0.20", c3(2000, 10_000), True),
        ("2100/10000 = 0.21", c3(2100, 10_000), False),
    ]
    passed = sum(got == want for _, got, want in checks)
    record(6, passed == 4, f"C3 boundaries {passed}/4: " + ", ".join(
        f"{label} -> {got}" for label, got, _ in checks))


def test_07_consistency_gating():
    windows, _ = run_random_windows()
    clean = sum(not is_consistent(ew.conditions) for ew in windows)
    record(7, len(windows) >= RANDOM_WINDOWS and clean == len(windows),
           f"{clean}/{len(windows)} randomized windows give consistent vectors")


def test_08_determinism():
    first = [r.to_json() for _, reports in run_case_studies().values() for r in reports]
    second = [r.to_json() for _, reports in run_case_studies().values() for r in reports]
    rand_a = run_random_windows()[1]
    rand_b = run_random_windows()[1]
    blob_a = "\n".join(first + rand_a).encode()
    blob_b = "\n".join(second + rand_b).encode()
    record(8, blob_a == blob_b, f"two runs of criteria 2 and 7 byte-identical ({len(blob_a)} bytes)")
