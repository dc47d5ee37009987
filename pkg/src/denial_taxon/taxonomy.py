"""Denial-attack conditions, attack classes and the condition-matching classifier."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable


class ConditionId(IntEnum):
    C0 = 0
    C1 = 1
    C2 = 2
    C3 = 3
    C4 = 4
    C5 = 5


CONDITION_DESCRIPTIONS = {
    ConditionId.C0: "malicious requests, in any capacity, are sent to a target",
    ConditionId.C1: "malicious requests are sent from only a single source",
    ConditionId.C2: "malicious requests come from more than one source",
    ConditionId.C3: "malicious requests are low-rate (packet count or fraction of normal traffic)",
    ConditionId.C4: "malicious requests target scalable cloud infrastructure",
    ConditionId.C5: "malicious requests target serverless infrastructure",
}


class VectorParseError(ValueError):
    def __init__(self, token: str):
        super().__init__(f"unknown condition token {token!r} (expected C0..C5)")
        self.token = token


@dataclass(frozen=True)
class ConditionVector:
    """Set of conditions observed for one window.

    Any of the 64 combinations can be constructed; use :func:`is_consistent`
    to check whether a vector makes sense.
    """

    present: frozenset[ConditionId] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "present", frozenset(ConditionId(c) for c in self.present))

    @classmethod
    def of(cls, *conditions: ConditionId | int) -> "ConditionVector":
        return cls(frozenset(ConditionId(c) for c in conditions))

    @classmethod
    def from_bits(cls, bits: int) -> "ConditionVector":
        """Vector whose bit ``i`` selects condition ``Ci``."""
        return cls(frozenset(c for c in ConditionId if bits >> c & 1))

    @property
    def bits(self) -> int:
        return sum(1 << c for c in self.present)

    def __contains__(self, item) -> bool:
        return item in self.present

    def __iter__(self):
        return iter(sorted(self.present))

    def __len__(self) -> int:
        return len(self.present)

    def __le__(self, other: "ConditionVector") -> bool:
        return self.present <= other.present

    def __ge__(self, other: "ConditionVector") -> bool:
        return self.present >= other.present

    def __lt__(self, other: "ConditionVector") -> bool:
        return self.present < other.present

    def __gt__(self, other: "ConditionVector") -> bool:
        return self.present > other.present

    def __or__(self, other: "ConditionVector") -> "ConditionVector":
        return ConditionVector(self.present | other.present)

    def __sub__(self, other: "ConditionVector") -> "ConditionVector":
        return ConditionVector(self.present - other.present)

    def symmetric_difference(self, other: "ConditionVector") -> "ConditionVector":
        return ConditionVector(self.present ^ other.present)

    @property
    def text(self) -> str:
        return ",".join(c.name for c in self)

    def __str__(self) -> str:
        return "{" + self.text + "}"


def vector_from_names(text: str) -> ConditionVector:
    """Parse ``"C0, c2"`` style lists; blank input gives the empty vector."""
    present = set()
    for raw in text.split(","):
        token = raw.strip()
        if not token:
            continue
        try:
            present.add(ConditionId[token.upper()])
        except KeyError:
            raise VectorParseError(token) from None
    return ConditionVector(frozenset(present))


class AttackClass(Enum):
    # declaration order is the canonical presentation order
    DOS = "DoS"
    DDOS = "DDoS"
    LDOS = "LDoS"
    LDDOS = "LDDoS"
    EDOS = "EDoS"
    DOW = "DoW"
    DDOW = "DDoW"

    def __str__(self) -> str:
        return self.value

    @property
    def rank(self) -> int:
        return _CLASS_RANK[self]

    @classmethod
    def parse(cls, name: str) -> "AttackClass":
        for member in cls:
            if member.value.lower() == name.strip().lower():
                return member
        raise ValueError(f"unknown attack class {name!r}")


_CLASS_RANK = {c: i for i, c in enumerate(AttackClass)}

C0, C1, C2, C3, C4, C5 = ConditionId

_REQUIRED = {
    AttackClass.DOS: ConditionVector.of(C0, C1),
    AttackClass.DDOS: ConditionVector.of(C0, C2),
    AttackClass.LDOS: ConditionVector.of(C0, C1, C3),
    AttackClass.LDDOS: ConditionVector.of(C0, C2, C3),
    AttackClass.EDOS: ConditionVector.of(C0, C4),
    AttackClass.DOW: ConditionVector.of(C0, C1, C4, C5),
    AttackClass.DDOW: ConditionVector.of(C0, C2, C4, C5),
}


def required_conditions(cls: AttackClass) -> ConditionVector:
    return _REQUIRED[cls]


class VennRegion(Enum):
    AVAILABILITY = "Availability"
    SUSTAINABILITY = "Sustainability"
    OVERLAP = "Overlap"

    def __str__(self) -> str:
        return self.value


_VENN = {
    AttackClass.DOS: VennRegion.AVAILABILITY,
    AttackClass.DDOS: VennRegion.AVAILABILITY,
    AttackClass.LDOS: VennRegion.AVAILABILITY,
    AttackClass.LDDOS: VennRegion.AVAILABILITY,
    AttackClass.EDOS: VennRegion.OVERLAP,
    AttackClass.DOW: VennRegion.SUSTAINABILITY,
    AttackClass.DDOW: VennRegion.SUSTAINABILITY,
}


def venn_region(cls: AttackClass) -> VennRegion:
    return _VENN[cls]


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


SOURCE_EXCLUSIVE = "C1-and-C2-exclusive"
SERVERLESS_NEEDS_CLOUD = "C5-requires-C4"
NEEDS_C0 = "conditions-require-C0"


def is_consistent(v: ConditionVector) -> list[Violation]:
    """Return the violated consistency rules (empty list when consistent)."""
    violations = []
    if C1 in v and C2 in v:
        violations.append(
            Violation(SOURCE_EXCLUSIVE, "a request stream cannot be both single-source and multi-source")
        )
    if C5 in v and C4 not in v:
        violations.append(
            Violation(SERVERLESS_NEEDS_CLOUD, "serverless targets are cloud-scalable targets")
        )
    if C0 not in v and len(v) > 0:
        violations.append(
            Violation(NEEDS_C0, "conditions C1..C5 describe malicious requests, which need C0")
        )
    return violations


class OutcomeKind(Enum):
    NO_ATTACK = "NoAttack"
    GENERIC_DENIAL = "GenericDenial"
    CLASSIFIED = "Classified"
    HYBRID = "Hybrid"
    INCONSISTENT = "Inconsistent"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ClassificationResult:
    observed: ConditionVector
    matched: tuple[AttackClass, ...]
    outcome_kind: OutcomeKind
    consistency_violations: tuple[Violation, ...] = ()
    explanation: tuple[str, ...] = ()

    @property
    def exact(self) -> bool:
        """True when some matched class requires exactly the observed conditions."""
        return any(required_conditions(c) == self.observed for c in self.matched)


def _sorted_classes(classes: Iterable[AttackClass]) -> tuple[AttackClass, ...]:
    return tuple(sorted(classes, key=lambda c: c.rank))


def classify(v: ConditionVector) -> ClassificationResult:
    """Assign attack classes to a condition vector.

    A class matches when all of its required conditions are present; among
    the matches only those with the largest required set are kept.  Several
    survivors make a Hybrid outcome.
    """
    lines = [
        f"{c.name} {'present' if c in v else 'absent'}: {CONDITION_DESCRIPTIONS[c]}"
        for c in ConditionId
    ]

    if C0 not in v:
        violations = tuple(is_consistent(v))
        lines.extend(f"ignored: {x}" for x in violations)
        lines.append("no malicious requests (C0 absent): no denial attack")
        return ClassificationResult(v, (), OutcomeKind.NO_ATTACK, violations, tuple(lines))

    if v == ConditionVector.of(C0):
        lines.append("only C0 holds: denial attack exists but no class is refined")
        return ClassificationResult(v, (), OutcomeKind.GENERIC_DENIAL, (), tuple(lines))

    violations = tuple(is_consistent(v))
    if violations:
        lines.extend(f"violation {x}" for x in violations)
        return ClassificationResult(v, (), OutcomeKind.INCONSISTENT, violations, tuple(lines))

    candidates = [c for c in AttackClass if required_conditions(c) <= v]
    for c in candidates:
        lines.append(f"candidate {c} requires {required_conditions(c)} ({len(required_conditions(c))} conditions)")

    if not candidates:
        lines.append(f"no class requirement is contained in {v}: generic denial with unmatched conditions")
        return ClassificationResult(v, (), OutcomeKind.GENERIC_DENIAL, (), tuple(lines))

    best = max(len(required_conditions(c)) for c in candidates)
    matched = _sorted_classes(c for c in candidates if len(required_conditions(c)) == best)
    if len(matched) == 1:
        kind = OutcomeKind.CLASSIFIED
        lines.append(f"classified as {matched[0]}")
    else:
        kind = OutcomeKind.HYBRID
        lines.append("hybrid of " + ", ".join(map(str, matched)) + f" (tie at {best} conditions)")
    surplus = v - required_conditions(matched[0]) if kind is OutcomeKind.CLASSIFIED else None
    if surplus:
        lines.append(f"surplus conditions beyond {matched[0]}: {surplus}")
    return ClassificationResult(v, matched, kind, (), tuple(lines))


ALL_VECTORS = tuple(ConditionVector.from_bits(b) for b in range(64))
