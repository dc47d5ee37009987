"""The 11-node conditional hierarchy of denial attacks as an explicit Hasse diagram.

Nodes are ordered by condition-set inclusion: ``a <= b`` when ``a`` requires
every condition ``b`` requires.  ``C0`` is the top, the inconsistent
all-conditions node is the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .taxonomy import (
    AttackClass,
    ConditionId,
    ConditionVector,
    required_conditions,
)

C0, C1, C2, C3, C4, C5 = ConditionId


class LatticeError(Exception):
    """The embedded lattice description violates a structural invariant."""


class UnknownNodeError(KeyError):
    def __init__(self, name: str, valid: list[str]):
        super().__init__(name)
        self.name = name
        self.valid = valid

    def __str__(self) -> str:
        return f"unknown lattice node {self.name!r}; valid names: {', '.join(self.valid)}"


class NotComparableError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeNode:
    id: str
    label: str
    condition_set: ConditionVector
    class_binding: AttackClass | None = None
    aliases: tuple[str, ...] = ()


NODES = (
    LatticeNode("C0", "C0-top", ConditionVector.of(C0), None, ("top",)),
    LatticeNode("DoS", "DoS/C1", ConditionVector.of(C0, C1), AttackClass.DOS, ("C1",)),
    LatticeNode("DDoS", "DDoS/C2", ConditionVector.of(C0, C2), AttackClass.DDOS, ("C2",)),
    LatticeNode("C3", "C3", ConditionVector.of(C0, C3)),
    LatticeNode("EDoS", "EDoS/C4", ConditionVector.of(C0, C4), AttackClass.EDOS, ("C4",)),
    LatticeNode("C5", "C5", ConditionVector.of(C0, C4, C5)),
    LatticeNode("LDoS", "LDoS", ConditionVector.of(C0, C1, C3), AttackClass.LDOS),
    LatticeNode("LDDoS", "LDDoS", ConditionVector.of(C0, C2, C3), AttackClass.LDDOS),
    LatticeNode("DoW", "DoW", ConditionVector.of(C0, C1, C4, C5), AttackClass.DOW),
    LatticeNode("DDoW", "DDoW", ConditionVector.of(C0, C2, C4, C5), AttackClass.DDOW),
    LatticeNode("bottom", "bottom", ConditionVector(frozenset(ConditionId)), None, ("bot",)),
)

# Undirected polylines as drawn in the figure; orientation comes from the condition sets.
FIGURE_PATHS = (
    ("DoS", "C0", "DDoS", "LDDoS", "bottom", "DoW"),
    ("bottom", "LDoS", "C3", "LDDoS"),
    ("bottom", "DDoW", "DDoS"),
    ("DDoW", "C5", "EDoS", "C0"),
    ("C3", "C0"),
    ("LDoS", "DoS", "DoW", "C5"),
)

EXPECTED_NODE_COUNT = 11
EXPECTED_COVER_COUNT = 17


def figure_covers(paths=FIGURE_PATHS, nodes=NODES) -> list[tuple[str, str]]:
    """Orient the drawn segments as (child, parent) cover pairs."""
    sets = {n.id: n.condition_set for n in nodes}
    covers = []
    for path in paths:
        for a, b in zip(path, path[1:]):
            if sets[a] > sets[b]:
                covers.append((a, b))
            elif sets[b] > sets[a]:
                covers.append((b, a))
            else:
                raise LatticeError(f"segment {a} -- {b} joins incomparable condition sets")
    return covers


class Lattice:
    """Immutable finite lattice given by nodes and cover (Hasse) edges.

    The constructor checks every structural invariant and raises
    :class:`LatticeError` on the first one that fails.
    """

    def __init__(self, nodes, covers):
        self.nodes = tuple(nodes)
        self.covers = frozenset(covers)
        self._by_id = {n.id: n for n in self.nodes}
        self._index = {n.id: i for i, n in enumerate(self.nodes)}
        self._alias = {}
        for n in self.nodes:
            for name in (n.id, n.label, *n.aliases, *( [n.class_binding.value] if n.class_binding else [])):
                self._alias[name.lower()] = n.id
        self.parents = {n.id: [] for n in self.nodes}
        self.children = {n.id: [] for n in self.nodes}
        for child, parent in sorted(self.covers):
            if child not in self._by_id or parent not in self._by_id:
                raise LatticeError(f"cover edge {child} -> {parent} names an unknown node")
            self.parents[child].append(parent)
            self.children[parent].append(child)
        self._up = self._reachability()
        self._validate()

    def _reachability(self) -> dict[str, frozenset[str]]:
        up = {}
        for n in self.nodes:
            seen = {n.id}
            stack = [n.id]
            while stack:
                for p in self.parents[stack.pop()]:
                    if p not in seen:
                        seen.add(p)
                        stack.append(p)
            up[n.id] = frozenset(seen)
        return up

    def _validate(self) -> None:
        if len(self.nodes) != EXPECTED_NODE_COUNT or len(self._by_id) != EXPECTED_NODE_COUNT:
            raise LatticeError(f"expected {EXPECTED_NODE_COUNT} distinct nodes, got {len(self._by_id)}")
        if len(self.covers) != EXPECTED_COVER_COUNT:
            raise LatticeError(f"expected {EXPECTED_COVER_COUNT} cover edges, got {len(self.covers)}")
        for child, parent in self.covers:
            if child in self._up[parent]:
                raise LatticeError(f"cycle through {child} and {parent}")
        ids = list(self._by_id)
        for a in ids:
            for b in ids:
                by_sets = self._by_id[a].condition_set >= self._by_id[b].condition_set
                if (b in self._up[a]) != by_sets:
                    raise LatticeError(f"order between {a} and {b} disagrees with condition sets")
        for child, parent in self.covers:
            # a cover is redundant if parent is reachable through another parent of child
            if any(parent in self._up[p] for p in self.parents[child] if p != parent):
                raise LatticeError(f"cover edge {child} -> {parent} is implied by other edges")
        tops = [n for n in ids if not self.parents[n]]
        bottoms = [n for n in ids if not self.children[n]]
        if len(tops) != 1 or len(bottoms) != 1:
            raise LatticeError(f"need unique top and bottom, got {tops} and {bottoms}")
        self.top, self.bottom = tops[0], bottoms[0]
        for a in ids:
            for b in ids:
                if self._greatest(self.lower_bounds(a, b)) is None:
                    raise LatticeError(f"{a} and {b} have no unique meet")
                if self._least(self.upper_bounds(a, b)) is None:
                    raise LatticeError(f"{a} and {b} have no unique join")
        for n in self.nodes:
            if n.class_binding is not None and required_conditions(n.class_binding) != n.condition_set:
                raise LatticeError(f"node {n.id} condition set differs from class {n.class_binding}")

    # lookup -----------------------------------------------------------

    def node_names(self) -> list[str]:
        return [n.label for n in self.nodes]

    def resolve(self, name: str) -> str:
        """Map an id, label, class name or condition alias to a node id."""
        try:
            return self._alias[name.strip().lower()]
        except KeyError:
            raise UnknownNodeError(name, self.node_names()) from None

    def node(self, name: str) -> LatticeNode:
        return self._by_id[self.resolve(name)]

    def node_for_class(self, cls: AttackClass) -> LatticeNode:
        return next(n for n in self.nodes if n.class_binding is cls)

    # order ------------------------------------------------------------

    def leq(self, a: str, b: str) -> bool:
        a, b = self.resolve(a), self.resolve(b)
        return b in self._up[a]

    def lower_bounds(self, a: str, b: str) -> list[str]:
        return [n.id for n in self.nodes if self.leq(n.id, a) and self.leq(n.id, b)]

    def upper_bounds(self, a: str, b: str) -> list[str]:
        return [n.id for n in self.nodes if self.leq(a, n.id) and self.leq(b, n.id)]

    def _greatest(self, candidates: list[str]) -> str | None:
        tops = [x for x in candidates if all(self.leq(y, x) for y in candidates)]
        return tops[0] if len(tops) == 1 else None

    def _least(self, candidates: list[str]) -> str | None:
        lows = [x for x in candidates if all(self.leq(x, y) for y in candidates)]
        return lows[0] if len(lows) == 1 else None

    def meet(self, a: str, b: str) -> str:
        return self._greatest(self.lower_bounds(self.resolve(a), self.resolve(b)))

    def join(self, a: str, b: str) -> str:
        return self._least(self.upper_bounds(self.resolve(a), self.resolve(b)))

    def construction_chain(self, start: str, end: str) -> "ConstructionChain":
        """Downward cover path from ``start`` to ``end``.

        At each step the child adding the smallest condition id is taken.
        """
        start, end = self.resolve(start), self.resolve(end)
        if not self.leq(end, start):
            raise NotComparableError(f"{end} is not below {start}; no construction chain")
        steps = []
        current = start
        while current != end:
            here = self._by_id[current].condition_set

            def key(child):
                added = sorted(self._by_id[child].condition_set - here)
                return (added, self._index[child])

            current = min((c for c in self.children[current] if self.leq(end, c)), key=key)
            steps.append((self._by_id[current], self._by_id[current].condition_set - here))
        return ConstructionChain(self._by_id[start], tuple(steps))

    # export -----------------------------------------------------------

    def sorted_covers(self) -> list[tuple[str, str]]:
        return sorted(self.covers, key=lambda e: (self._index[e[0]], self._index[e[1]]))

    def edge_list(self) -> str:
        return "\n".join(
            f"{self._by_id[c].label} -> {self._by_id[p].label}" for c, p in self.sorted_covers()
        )

    def to_dot(self) -> str:
        lines = ["digraph denial_lattice {", "  rankdir=BT;"]
        for n in self.nodes:
            lines.append(f'  "{n.id}" [label="{n.label}\\n{n.condition_set.text}"];')
        for c, p in self.sorted_covers():
            lines.append(f'  "{c}" -> "{p}";')
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ConstructionChain:
    start: LatticeNode
    steps: tuple[tuple[LatticeNode, ConditionVector], ...]

    @property
    def end(self) -> LatticeNode:
        return self.steps[-1][0] if self.steps else self.start

    def render(self) -> str:
        parts = [self.start.label]
        for node, added in self.steps:
            parts.append(f"+{added.text} -> {node.label}")
        return " ".join(parts)


@lru_cache(maxsize=1)
def build_lattice() -> Lattice:
    return Lattice(NODES, figure_covers())


def nearest_classes(v: ConditionVector) -> list[tuple[AttackClass, int]]:
    """All seven classes by Hamming distance to ``v``, closest first."""
    scored = [(c, len(v.symmetric_difference(required_conditions(c)))) for c in AttackClass]
    return sorted(scored, key=lambda item: (item[1], item[0].rank))
