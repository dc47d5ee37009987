"""Condition-based classification of denial attacks over windowed flow records."""

from .features import Thresholds, WindowFeatures, estimate_baseline, evaluate_conditions, evaluate_stream, window_stream
from .ingest import FlowRecord, Infra, TargetProfile, load_target_profiles, parse_flows
from .lattice import Lattice, build_lattice, nearest_classes
from .scenarios import ScenarioSpec, generate, preset
from .taxonomy import (
    AttackClass,
    ClassificationResult,
    ConditionId,
    ConditionVector,
    OutcomeKind,
    VennRegion,
    classify,
    is_consistent,
    required_conditions,
    vector_from_names,
    venn_region,
)

__version__ = "0.1.0"
