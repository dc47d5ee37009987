"""Embedded self-verification used by ``denial-taxon check-taxonomy``.

The vector check compares :func:`classify` against a second matcher that
works on bitmasks and shares no code with the classifier.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lattice as lattice_mod
from .taxonomy import ALL_VECTORS, AttackClass, OutcomeKind, classify, required_conditions

# bit i = condition Ci; transcribed directly from the class/condition checkmark table
_MASKS = (
    ("DoS", 0b000011),
    ("DDoS", 0b000101),
    ("LDoS", 0b001011),
    ("LDDoS", 0b001101),
    ("EDoS", 0b010001),
    ("DoW", 0b110011),
    ("DDoW", 0b110101),
)


def bitmask_oracle(bits: int) -> tuple[str, tuple[str, ...]]:
    """Return ``(outcome, class names)`` for the vector encoded by ``bits``."""
    if not bits & 1:
        return "NoAttack", ()
    if bits == 1:
        return "GenericDenial", ()
    if (bits & 0b110) == 0b110 or (bits & 0b100000 and not bits & 0b10000):
        return "Inconsistent", ()
    hits = [(name, bin(mask).count("1")) for name, mask in _MASKS if bits & mask == mask]
    if not hits:
        return "GenericDenial", ()
    top = max(size for _, size in hits)
    names = tuple(name for name, size in hits if size == top)
    return ("Classified" if len(names) == 1 else "Hybrid"), names


@dataclass
class SuiteResult:
    name: str
    passed: int
    total: int
    failures: list

    @property
    def ok(self) -> bool:
        return self.passed == self.total and not self.failures


def check_round_trip() -> SuiteResult:
    failures = []
    for cls in AttackClass:
        r = classify(required_conditions(cls))
        if r.outcome_kind is not OutcomeKind.CLASSIFIED or r.matched != (cls,):
            failures.append(f"{cls}: got {r.outcome_kind} {[str(c) for c in r.matched]}")
    return SuiteResult("class round-trips", len(AttackClass) - len(failures), len(AttackClass), failures)


def check_vectors() -> SuiteResult:
    failures = []
    for v in ALL_VECTORS:
        r = classify(v)
        got = (r.outcome_kind.value, tuple(c.value for c in r.matched))
        want = bitmask_oracle(v.bits)
        if got != want:
            failures.append(f"{v}: classify {got} oracle {want}")
    return SuiteResult("vectors", len(ALL_VECTORS) - len(failures), len(ALL_VECTORS), failures)


def check_lattice(builder=None) -> SuiteResult:
    builder = builder or (lambda: lattice_mod.Lattice(
        lattice_mod.NODES, lattice_mod.figure_covers(lattice_mod.FIGURE_PATHS, lattice_mod.NODES)))
    try:
        lat = builder()
    except lattice_mod.LatticeError as exc:
        total = lattice_mod.EXPECTED_NODE_COUNT ** 2
        return SuiteResult("pairs have meet and join", 0, total, [f"construction failed: {exc}"])
    ids = [n.id for n in lat.nodes]
    failures = []
    for a in ids:
        for b in ids:
            lows = [x for x in ids if lat.leq(x, a) and lat.leq(x, b)]
            highs = [x for x in ids if lat.leq(a, x) and lat.leq(b, x)]
            glb = [x for x in lows if all(lat.leq(y, x) for y in lows)]
            lub = [x for x in highs if all(lat.leq(x, y) for y in highs)]
            if len(glb) != 1 or len(lub) != 1 or lat.meet(a, b) != glb[0] or lat.join(a, b) != lub[0]:
                failures.append(f"({a}, {b})")
    return SuiteResult("pairs have meet and join", len(ids) ** 2 - len(failures), len(ids) ** 2, failures)


def run_all(lattice_builder=None) -> list[SuiteResult]:
    return [check_round_trip(), check_vectors(), check_lattice(lattice_builder)]


def summary_line(results: list[SuiteResult]) -> str:
    parts = []
    for r in results:
        parts.append(f"{r.passed}/{r.total} {r.name} {'OK' if r.ok else 'FAILED'}")
    return "; ".join(parts)
