import pytest

from denial_taxon.features import evaluate_stream
from denial_taxon.ingest import Infra, load_target_profiles, read_flows
from denial_taxon.scenarios import PRESETS, ScenarioError, ScenarioSpec, custom, generate, preset, write_scenario
from denial_taxon.taxonomy import AttackClass, OutcomeKind, classify, vector_from_names


@pytest.mark.parametrize("name, cls, vector", [
    ("syn_flood", AttackClass.DOS, "C0,C1"),
    ("mirai", AttackClass.DDOS, "C0,C2"),
    ("slowloris", AttackClass.LDOS, "C0,C1,C3"),
    ("ddow_billing", AttackClass.DDOW, "C0,C2,C3,C4,C5"),
])
def test_preset_ground_truth(name, cls, vector):
    spec = preset(name, seed=3)
    assert spec.predicted_conditions() == vector_from_names(vector)
    records, profiles, expected = generate(spec)
    assert expected is cls
    attack_windows = 0
    for ew in evaluate_stream(records, profiles):
        result = classify(ew.conditions)
        if ew.features.malicious_pkts:
            attack_windows += 1
            assert ew.conditions == vector_from_names(vector)
            assert result.outcome_kind is OutcomeKind.CLASSIFIED and result.matched == (cls,)
        else:
            assert result.outcome_kind is OutcomeKind.NO_ATTACK
    assert attack_windows == spec.window_count - spec.benign_lead_windows


def test_records_sorted_and_labelled():
    records, _, _ = generate(preset("slowloris"))
    assert [r.ts_ms for r in records] == sorted(r.ts_ms for r in records)
    assert {r.src for r in records if r.malicious} == {"10.66.0.0"}
    assert all(not r.src.startswith("10.66.") for r in records if not r.malicious)


def test_seed_determinism_and_sensitivity():
    assert generate(preset("mirai", 7)) == generate(preset("mirai", 7))
    assert generate(preset("mirai", 7))[0] != generate(preset("mirai", 8))[0]


def test_written_files_byte_identical(tmp_path):
    a = write_scenario(preset("ddow_billing", 1), tmp_path / "a")
    b = write_scenario(preset("ddow_billing", 1), tmp_path / "b")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    assert a[2].read_text() == "DDoW\n"
    assert read_flows(a[0]) == generate(preset("ddow_billing", 1))[0]
    assert load_target_profiles(a[1])["victim"].infra is Infra.SERVERLESS


@pytest.mark.parametrize("kwargs", [
    {"attacker_count": 0},
    {"malicious_pkts_per_src_per_window": 0},
    {"duration_secs": 0},
    {"benign_pkts_per_window": -1},
    {"duration_secs": 60, "benign_lead_windows": 1},
])
def test_invalid_custom(kwargs):
    with pytest.raises(ScenarioError):
        custom(**kwargs)


def test_unknown_preset():
    with pytest.raises(ScenarioError):
        preset("teardrop")


def test_custom_expected_from_prediction():
    spec = custom(attacker_count=1, malicious_pkts_per_src_per_window=5000,
                  benign_pkts_per_window=1000, target_infra=Infra.SERVERLESS)
    assert spec.expected_class is AttackClass.DOW
    spec = custom(attacker_count=4, malicious_pkts_per_src_per_window=5000, target_infra=Infra.CLOUD_SCALABLE)
    assert spec.expected_class is None  # DDoS and EDoS tie


def test_partial_final_window():
    spec = ScenarioSpec("custom", duration_secs=150, attacker_count=2, malicious_pkts_per_src_per_window=10)
    records, _, _ = generate(spec)
    assert spec.window_count == 3
    assert max(r.ts_ms for r in records) < spec.start_ms + 150_000


def test_presets_pin_expected_class():
    assert all(p.expected_class is not None for p in PRESETS.values())
