"""Graph rewrites for Pauli Y and Z measurements on graph states.

Measuring ``Z`` on vertex ``a`` deletes it. Measuring ``Y`` locally
complements at ``a`` and then deletes it. In both cases the rewritten graph
does not depend on the outcome; the outcome only decides which diagonal
local Clifford sits on the former neighbours of ``a``.

The post-measurement state of the unmeasured qubits is ``U |G'>`` with ``U``
the product of the recorded tags. Tag matrices (up to global phase):

==============  ===============
``Z``           diag(1, -1)
``sqrt(-iZ)``   diag(1, i)
``sqrt(+iZ)``   diag(1, -i)
==============  ===============

``Y`` outcome +1 puts ``sqrt(-iZ)`` on every neighbour, outcome -1 puts
``sqrt(+iZ)``; ``Z`` outcome -1 puts ``Z`` on every neighbour. These phases
are checked against the dense simulator in the test-suite.

Later measurements in a pattern are taken in the Pauli frame left by earlier
ones: a vertex already carrying tags is measured in ``U P U^dagger`` so that
the rewrite rule for ``P`` still applies. The frame in force is logged per
step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import InputError
from .gf2 import BitMatrix
from .graph import Graph, _bits

__all__ = [
    "TAG_EXPONENT",
    "CorrectionRecord",
    "MeasuredStep",
    "MeasurementPattern",
    "PatternStep",
    "local_complement",
    "delete_vertex",
    "measure_pauli",
    "apply_pattern",
]

BASES = ("Y", "Z")

# tag -> power of S = diag(1, i)
TAG_EXPONENT = {"identity": 0, "sqrt(-iZ)": 1, "Z": 2, "sqrt(+iZ)": 3}
_EXPONENT_TAG = {v: k for k, v in TAG_EXPONENT.items()}


def _check_vertex(g: Graph, a: int) -> None:
    if isinstance(a, bool) or not isinstance(a, int) or not 0 <= a < g.n:
        raise InputError(f"vertex {a!r} out of range [0, {g.n})")


def local_complement(g: Graph, a: int) -> Graph:
    """Complement the subgraph induced on the neighbourhood of ``a``."""
    _check_vertex(g, a)
    na = g.nbr_mask(a)
    rows = list(g.adjacency.data)
    for b in _bits(na):
        rows[b] ^= na & ~(1 << b)
    return Graph(g.n, BitMatrix(g.n, g.n, tuple(rows)), g.coords, g.labels)


def delete_vertex(g: Graph, a: int) -> tuple[Graph, dict[int, int]]:
    """Remove ``a``; survivors keep their relative order. Returns (graph, old->new)."""
    _check_vertex(g, a)
    keep = [v for v in range(g.n) if v != a]
    return g.induced(keep)


@dataclass(frozen=True)
class MeasuredStep:
    vertex: int
    basis: str
    outcome: int
    frame: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {"v": self.vertex, "basis": self.basis, "outcome": self.outcome, "frame": list(self.frame)}


@dataclass
class CorrectionRecord:
    """Local corrections left on surviving vertices plus the measurement log.

    ``tags`` is keyed by vertex index in the *output* graph; each list is in
    application order. ``mapping`` sends input indices of surviving vertices
    to output indices.
    """

    tags: dict[int, list[str]] = field(default_factory=dict)
    measured: list[MeasuredStep] = field(default_factory=list)
    mapping: dict[int, int] = field(default_factory=dict)

    @property
    def vertex(self) -> int | None:
        return self.measured[-1].vertex if self.measured else None

    @property
    def outcome(self) -> int | None:
        return self.measured[-1].outcome if self.measured else None

    def exponent(self, v: int) -> int:
        """Net power of diag(1, i) on output vertex ``v``."""
        return sum(TAG_EXPONENT[t] for t in self.tags.get(v, ())) % 4

    def net_tag(self, v: int) -> str:
        return _EXPONENT_TAG[self.exponent(v)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "tags": {str(k): list(v) for k, v in sorted(self.tags.items())},
            "measured": [s.to_dict() for s in self.measured],
            "mapping": {str(k): v for k, v in sorted(self.mapping.items())},
        }


def measure_pauli(g: Graph, a: int, basis: str, outcome: int = 1) -> tuple[Graph, CorrectionRecord]:
    """Apply the graph rule for measuring ``basis`` on ``a`` with ``outcome``."""
    _check_vertex(g, a)
    if basis not in BASES:
        raise InputError(f"basis must be one of {BASES}, got {basis!r}")
    if outcome not in (1, -1):
        raise InputError(f"outcome must be +1 or -1, got {outcome!r}")
    nbrs = g.neighbors(a)
    if basis == "Y":
        h, mapping = delete_vertex(local_complement(g, a), a)
        tag = "sqrt(-iZ)" if outcome == 1 else "sqrt(+iZ)"
    else:
        h, mapping = delete_vertex(g, a)
        tag = None if outcome == 1 else "Z"
    tags = {mapping[b]: [tag] for b in nbrs} if tag else {}
    rec = CorrectionRecord(tags=tags, measured=[MeasuredStep(a, basis, outcome)], mapping=mapping)
    return h, rec


@dataclass(frozen=True)
class PatternStep:
    vertex: int
    basis: str
    outcome: int = 1


@dataclass(frozen=True)
class MeasurementPattern:
    """Ordered Pauli measurement instructions on original vertex indices."""

    steps: tuple[PatternStep, ...] = ()

    @classmethod
    def of(cls, items: Iterable) -> MeasurementPattern:
        """Build from ``(v, basis)`` or ``(v, basis, outcome)`` tuples."""
        steps = []
        for it in items:
            if isinstance(it, PatternStep):
                steps.append(it)
            else:
                steps.append(PatternStep(*it))
        return cls(tuple(steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def validate(self, g: Graph) -> None:
        seen = set()
        for i, s in enumerate(self.steps):
            if isinstance(s.vertex, bool) or not isinstance(s.vertex, int) or not 0 <= s.vertex < g.n:
                raise InputError(f"step {i}: vertex {s.vertex!r} not in graph of {g.n} vertices")
            if s.vertex in seen:
                raise InputError(f"step {i}: vertex {s.vertex} measured twice")
            if s.basis not in BASES:
                raise InputError(f"step {i}: basis must be Y or Z, got {s.basis!r}")
            if s.outcome not in (1, -1):
                raise InputError(f"step {i}: outcome must be +1 or -1")
            seen.add(s.vertex)

    def to_dict(self) -> dict[str, Any]:
        return {"pattern": [{"v": s.vertex, "basis": s.basis, "outcome": s.outcome} for s in self.steps]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: Any) -> MeasurementPattern:
        if not isinstance(doc, dict) or not isinstance(doc.get("pattern"), list):
            raise InputError("pattern document must be {\"pattern\": [...]}")
        steps = []
        for i, item in enumerate(doc["pattern"]):
            if not isinstance(item, dict) or "v" not in item or "basis" not in item:
                raise InputError(f"pattern[{i}] needs 'v' and 'basis'")
            steps.append(PatternStep(item["v"], item["basis"], item.get("outcome", 1)))
        return cls(tuple(steps))

    @classmethod
    def from_json(cls, text: str) -> MeasurementPattern:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid pattern JSON at char {exc.pos}: {exc.msg}") from exc
        return cls.from_dict(doc)


def apply_pattern(g: Graph, pattern: MeasurementPattern) -> tuple[Graph, CorrectionRecord, dict[int, int]]:
    """Run ``pattern`` step by step.

    Returns the final graph, the accumulated corrections (keyed by output
    index) and the map from surviving original vertices to output indices.
    """
    if not isinstance(pattern, MeasurementPattern):
        pattern = MeasurementPattern.of(pattern)
    pattern.validate(g)
    cur = g
    where = {v: v for v in range(g.n)}  # original -> current index
    tags: dict[int, list[str]] = {}  # original -> tags
    log: list[MeasuredStep] = []
    for s in pattern.steps:
        frame = tuple(tags.pop(s.vertex, ()))
        cur, rec = measure_pauli(cur, where[s.vertex], s.basis, s.outcome)
        back = {}
        for orig, idx in where.items():
            if orig != s.vertex:
                back[rec.mapping[idx]] = orig
        where = {orig: rec.mapping[idx] for orig, idx in where.items() if orig != s.vertex}
        for new_idx, t in rec.tags.items():
            tags.setdefault(back[new_idx], []).extend(t)
        log.append(MeasuredStep(s.vertex, s.basis, s.outcome, frame))
    out_tags = {where[o]: t for o, t in sorted(tags.items())}
    record = CorrectionRecord(tags=dict(sorted(out_tags.items())), measured=log, mapping=dict(where))
    return cur, record, dict(where)
