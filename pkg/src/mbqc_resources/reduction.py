"""Pauli measurement patterns that carve square-lattice graphs out of other lattices.

A pattern is checked by running it through the graph rewrite rules and
testing the surviving graph for exact isomorphism with ``grid(k, k)``. The
resulting :class:`ReductionCertificate` is plain data: it embeds the source
graph, the pattern, a digest of the graph after every step and the
isomorphism, so it can be replayed with nothing but the rewrite rules.

Certificate JSON (``format`` = ``"mbqc-reduction-certificate"``, version 1)::

    {
      "format": ..., "version": 1,
      "source": {"spec": {"kind": str, "dims": [int, ...]} | null,
                 "graph": <graph document>},
      "target": {"kind": "grid", "dims": [k, k]},
      "pattern": [{"v": int, "basis": "Y"|"Z", "outcome": 1}, ...],
      "steps": [{"v", "index", "basis", "outcome", "n", "m", "digest"}, ...],
      "result": <graph document>,
      "isomorphism": {"<result vertex>": <target vertex>} | null,
      "corrections": {...},
      "pass": bool
    }

``index`` is the position of the measured vertex in the graph current at
that step, ``n``/``m`` are vertex and edge counts after it and ``digest`` is
the SHA-256 of the sorted edge list after it. Documents are written with
sorted keys and no whitespace, so equal certificates are equal bytes.

Pattern search
--------------
Vertices are grouped into classes by their natural cell coordinates modulo
a period plus their sublattice index (see :func:`cell_coordinates`). Each
class is left alone, measured in ``Y`` or measured in ``Z``. Per candidate,
``Z`` measurements run first and ``Y`` measurements then run in ascending
vertex order. If the survivors contain an induced copy of the target, every
survivor outside the copy is removed with a trailing ``Z`` measurement. The
first success in the fixed exploration order is returned.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Iterable, Sequence

from .calculus import MeasurementPattern, PatternStep, apply_pattern, measure_pauli
from .errors import InputError
from .graph import (
    Graph,
    LatticeSpec,
    _bits,
    cell_coordinates,
    from_dict,
    induced_embedding,
    is_isomorphic,
    lattice,
    to_dict,
)

__all__ = [
    "CERT_FORMAT",
    "ReductionCertificate",
    "SearchSpace",
    "SearchHit",
    "ChainReport",
    "verify_reduction",
    "verify_transformation",
    "replay_certificate",
    "search_pattern",
    "search_transformation",
    "load_asset",
    "asset_names",
    "build_asset",
    "asset_json",
    "certify_asset",
    "chain_route",
]

CERT_FORMAT = "mbqc-reduction-certificate"
ASSET_FORMAT = "mbqc-pattern-asset"
ASSET_VERSION = 1
ASSET_KINDS = ("hexagonal", "triangular", "kagome")
_DUMP = {"sort_keys": True, "separators": (",", ":")}


def _digest(g: Graph) -> str:
    return hashlib.sha256(json.dumps(g.edges()).encode()).hexdigest()


def _spec_dict(spec: LatticeSpec | None) -> dict[str, Any] | None:
    return None if spec is None else {"kind": spec.kind, "dims": list(spec.dims)}


@dataclass
class ReductionCertificate:
    source: Graph
    source_spec: LatticeSpec | None
    pattern: MeasurementPattern
    target_spec: LatticeSpec
    result: Graph
    isomorphism: dict[int, int] | None
    steps: list[dict[str, Any]]
    corrections: dict[str, Any]
    passed: bool

    @property
    def k(self) -> int | None:
        return self.target_spec.dims[0] if self.target_spec.kind == "grid" else None

    def to_dict(self) -> dict[str, Any]:
        iso = None if self.isomorphism is None else {str(a): b for a, b in sorted(self.isomorphism.items())}
        return {
            "format": CERT_FORMAT,
            "version": 1,
            "source": {"spec": _spec_dict(self.source_spec), "graph": to_dict(self.source)},
            "target": _spec_dict(self.target_spec),
            "pattern": self.pattern.to_dict()["pattern"],
            "steps": self.steps,
            "result": to_dict(self.result),
            "isomorphism": iso,
            "corrections": self.corrections,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), **_DUMP)


def _step_log(source: Graph, pattern: MeasurementPattern) -> tuple[Graph, list[dict[str, Any]]]:
    cur = source
    where = {v: v for v in range(source.n)}
    log = []
    for s in pattern.steps:
        idx = where.pop(s.vertex)
        cur, rec = measure_pauli(cur, idx, s.basis, s.outcome)
        where = {o: rec.mapping[i] for o, i in where.items()}
        log.append(
            {
                "v": s.vertex,
                "index": idx,
                "basis": s.basis,
                "outcome": s.outcome,
                "n": cur.n,
                "m": cur.num_edges,
                "digest": _digest(cur),
            }
        )
    return cur, log


def verify_transformation(
    source: Graph,
    pattern: MeasurementPattern,
    target: LatticeSpec,
    source_spec: LatticeSpec | None = None,
) -> ReductionCertificate:
    """Run ``pattern`` on ``source`` and test the result against ``lattice(target)``."""
    if not isinstance(pattern, MeasurementPattern):
        pattern = MeasurementPattern.of(pattern)
    pattern.validate(source)
    result, record, _ = apply_pattern(source, pattern)
    _, steps = _step_log(source, pattern)
    iso = is_isomorphic(result, lattice(target))
    return ReductionCertificate(
        source=source,
        source_spec=source_spec,
        pattern=pattern,
        target_spec=target,
        result=result,
        isomorphism=iso,
        steps=steps,
        corrections=record.to_dict(),
        passed=iso is not None,
    )


def verify_reduction(
    source: Graph,
    pattern: MeasurementPattern,
    k: int,
    source_spec: LatticeSpec | None = None,
) -> ReductionCertificate:
    """Certificate for ``pattern`` turning ``source`` into ``grid(k, k)``.

    Outcomes are taken as given in the pattern (normally all +1); the graph
    part of the result does not depend on them.
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise InputError(f"k must be a positive integer, got {k!r}")
    return verify_transformation(source, pattern, LatticeSpec("grid", (k, k)), source_spec)


def replay_certificate(text: str) -> tuple[bool, list[str]]:
    """Independently re-check a certificate document.

    Returns ``(ok, problems)``. ``ok`` means every logged step reproduces,
    the stored result and isomorphism are consistent with a fresh run, the
    pass flag is what the fresh run says, and re-serialising the fresh run
    gives byte-identical JSON. A failing-but-honest certificate replays with
    ``ok`` true and its pass flag false.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid certificate JSON at char {exc.pos}: {exc.msg}") from exc
    if not isinstance(doc, dict) or doc.get("format") != CERT_FORMAT:
        raise InputError(f"not a {CERT_FORMAT} document")
    for key in ("source", "target", "pattern", "steps", "result", "isomorphism", "pass"):
        if key not in doc:
            raise InputError(f"certificate is missing {key!r}")
    source = from_dict(doc["source"].get("graph"))
    spec_doc = doc["source"].get("spec")
    spec = None if spec_doc is None else LatticeSpec(spec_doc["kind"], tuple(spec_doc["dims"]))
    target = LatticeSpec(doc["target"]["kind"], tuple(doc["target"]["dims"]))
    pattern = MeasurementPattern.from_dict({"pattern": doc["pattern"]})
    problems: list[str] = []

    # step-by-step replay against the log
    _, steps = _step_log(source, pattern)
    if len(steps) != len(doc["steps"]):
        problems.append("step count differs from log")
    for i, (a, b) in enumerate(zip(steps, doc["steps"])):
        if a != b:
            problems.append(f"step {i} does not reproduce")
            break
    fresh = verify_transformation(source, pattern, target, spec)
    if fresh.result.edges() != from_dict(doc["result"]).edges() or fresh.result.n != doc["result"].get("n"):
        problems.append("result graph does not reproduce")
    # the stored map must itself be an isomorphism, whichever one was found
    stored = doc["isomorphism"]
    tgt = lattice(target)
    if stored is not None:
        iso = {int(a): b for a, b in stored.items()}
        ok_map = (
            sorted(iso) == list(range(fresh.result.n))
            and sorted(iso.values()) == list(range(tgt.n))
            and all(tgt.has_edge(iso[a], iso[b]) for a, b in fresh.result.edges())
            and fresh.result.num_edges == tgt.num_edges
        )
        if not ok_map:
            problems.append("stored isomorphism is not an isomorphism")
    if bool(doc["pass"]) != fresh.passed or (stored is not None) != fresh.passed:
        problems.append("pass flag disagrees with replay")
    if fresh.to_json() != text.rstrip("\n"):
        problems.append("re-serialised certificate differs from input bytes")
    return not problems, problems


# --------------------------------------------------------------------------
# search


@dataclass(frozen=True)
class SearchSpace:
    """Finite space of periodic class assignments.

    ``periods`` are tried in order. ``bases`` lists the per-class choices
    in exploration order; ``"keep"`` leaves a class unmeasured.
    ``max_measured_fraction`` bounds the share of vertices measured by the
    class assignment itself (trimming is not counted). ``budget`` caps the
    number of candidates examined, None for no cap.
    """

    kind: str | None = None
    periods: tuple[tuple[int, int], ...] = ((1, 1), (1, 2), (2, 1), (2, 2))
    bases: tuple[str, ...] = ("keep", "Y", "Z")
    max_measured_fraction: float = 1.0
    budget: int | None = None

    def __post_init__(self) -> None:
        if not self.periods or any(len(p) != 2 or min(p) < 1 for p in self.periods):
            raise InputError("periods must be pairs of positive integers")
        if not self.bases or any(b not in ("keep", "Y", "Z") for b in self.bases):
            raise InputError("bases must be drawn from keep, Y, Z")
        if not 0.0 <= self.max_measured_fraction <= 1.0:
            raise InputError("max_measured_fraction must be in [0, 1]")


@dataclass
class SearchHit:
    pattern: MeasurementPattern
    period: tuple[int, int]
    assignment: dict[tuple[int, int, int], str]
    embedding: dict[int, int]  # target vertex -> source vertex
    candidates: int


def _cells(source: Graph, kind: str | None) -> list[tuple[int, int, int]]:
    if source.coords is None:
        raise InputError("pattern search needs vertex coordinates")
    if kind is not None:
        return cell_coordinates(source, kind)
    try:
        return cell_coordinates(source, "grid")
    except InputError:
        raise InputError("coordinates are not integral; give the lattice kind") from None


def _rewrite_masks(rows: Sequence[int], zs: Iterable[int], ys: Iterable[int]) -> tuple[list[int], int]:
    # same graph rules as the calculus module, on raw bitmasks
    rows = list(rows)
    dead = 0
    for z in zs:
        dead |= 1 << z
    for y in ys:
        nb = rows[y] & ~dead
        for b in _bits(nb):
            rows[b] ^= nb & ~(1 << b)
        dead |= 1 << y
    return rows, dead


def search_transformation(source: Graph, target: Graph, space: SearchSpace | None = None) -> SearchHit | None:
    """First periodic pattern leaving exactly an induced copy of ``target``."""
    space = space or SearchSpace()
    cells = _cells(source, space.kind)
    rows0 = [source.nbr_mask(v) for v in range(source.n)]
    full = (1 << source.n) - 1
    tried = 0
    for px, py in space.periods:
        classes = sorted({(i % px, j % py, s) for i, j, s in cells})
        members = {c: [] for c in classes}
        for v, (i, j, s) in enumerate(cells):
            members[(i % px, j % py, s)].append(v)
        for choice in itertools.product(space.bases, repeat=len(classes)):
            measured = sum(len(members[c]) for c, b in zip(classes, choice) if b != "keep")
            if measured > space.max_measured_fraction * source.n:
                continue
            if space.budget is not None and tried >= space.budget:
                return None
            tried += 1
            zs = sorted(v for c, b in zip(classes, choice) if b == "Z" for v in members[c])
            ys = sorted(v for c, b in zip(classes, choice) if b == "Y" for v in members[c])
            rows, dead = _rewrite_masks(rows0, zs, ys)
            alive = full & ~dead
            emb = induced_embedding(rows, alive, target)
            if emb is None:
                continue
            trim = sorted(set(_bits(alive)) - set(emb.values()))
            steps = [PatternStep(v, "Z") for v in zs] + [PatternStep(v, "Y") for v in ys]
            steps += [PatternStep(v, "Z") for v in trim]
            return SearchHit(
                pattern=MeasurementPattern(tuple(steps)),
                period=(px, py),
                assignment=dict(zip(classes, choice)),
                embedding=emb,
                candidates=tried,
            )
    return None


def search_pattern(source: Graph, k: int, search: SearchSpace | None = None) -> MeasurementPattern | None:
    """Pattern turning ``source`` into ``grid(k, k)``, or None once the space is exhausted."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise InputError(f"k must be a positive integer, got {k!r}")
    hit = search_transformation(source, lattice("grid", (k, k)), search)
    return None if hit is None else hit.pattern


# --------------------------------------------------------------------------
# shipped pattern assets


def asset_names() -> list[str]:
    return [f"{kind}_k{k}" for kind in ASSET_KINDS for k in (2, 3)]


def _asset_text(name: str) -> str:
    try:
        return resources.files(__package__).joinpath(f"data/patterns/v{ASSET_VERSION}/{name}.json").read_text()
    except FileNotFoundError:
        raise InputError(f"no pattern asset named {name!r}; have {asset_names()}") from None


def load_asset(kind: str, k: int) -> dict[str, Any]:
    """Asset document for ``kind`` targeting ``grid(k, k)``."""
    kind = {"hex": "hexagonal", "tri": "triangular"}.get(kind, kind)
    doc = json.loads(_asset_text(f"{kind}_k{k}"))
    if doc.get("format") != ASSET_FORMAT or doc.get("version") != ASSET_VERSION:
        raise InputError(f"asset {kind}_k{k} has an unexpected format")
    return doc


def build_asset(kind: str, dims: Sequence[int], k: int, space: SearchSpace | None = None) -> dict[str, Any] | None:
    """Run the search on ``lattice(kind, dims)`` and package the hit as an asset."""
    space = space or SearchSpace(kind=kind)
    if space.kind != kind:
        raise InputError("search space kind must match the asset kind")
    src = lattice(kind, tuple(dims))
    hit = search_transformation(src, lattice("grid", (k, k)), space)
    if hit is None:
        return None
    return {
        "format": ASSET_FORMAT,
        "version": ASSET_VERSION,
        "source": {"kind": kind, "dims": list(dims)},
        "k": k,
        "period": list(hit.period),
        "assignment": [[i, j, s, b] for (i, j, s), b in sorted(hit.assignment.items())],
        "pattern": hit.pattern.to_dict()["pattern"],
    }


def asset_json(doc: dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True) + "\n"


def certify_asset(kind: str, k: int) -> ReductionCertificate:
    doc = load_asset(kind, k)
    spec = LatticeSpec(doc["source"]["kind"], tuple(doc["source"]["dims"]))
    pattern = MeasurementPattern.from_dict({"pattern": doc["pattern"]})
    return verify_reduction(lattice(spec), pattern, doc["k"], source_spec=spec)


# --------------------------------------------------------------------------
# chained route hexagonal -> triangular -> kagome -> square


@dataclass
class ChainReport:
    k: int
    stages: list[ReductionCertificate] = field(default_factory=list)
    composite: ReductionCertificate | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.composite is not None and self.composite.passed and all(s.passed for s in self.stages)

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "pass": self.passed,
            "note": self.note,
            "stages": [
                {
                    "source": _spec_dict(s.source_spec),
                    "target": _spec_dict(s.target_spec),
                    "measured": len(s.pattern),
                    "pass": s.passed,
                }
                for s in self.stages
            ],
            "composite": None if self.composite is None else self.composite.to_dict(),
        }


# hand-derived sublattice moves for the first two links
_HEX_TO_TRI = SearchSpace(kind="hexagonal", periods=((2, 2),), bases=("keep", "Y"))
_TRI_TO_KAG = SearchSpace(kind="triangular", periods=((2, 2),), bases=("keep", "Z"))


def _grow(kind: str, target: Graph, space: SearchSpace, start: int, stop: int) -> tuple[LatticeSpec, SearchHit] | None:
    for size in range(start, stop + 1):
        spec = LatticeSpec(kind, (size, size))
        hit = search_transformation(lattice(spec), target, space)
        if hit is not None:
            return spec, hit
    return None


def chain_route(k: int, max_size: int = 16) -> ChainReport:
    """Compose hexagonal -> triangular -> kagome -> grid(k, k).

    The kagome link is the shipped asset. The triangular patch is the
    smallest square patch from which ``Z`` on a sublattice leaves the
    asset's kagome patch, and likewise the hexagonal patch with ``Y``.
    Each link is certified on its own, then the composed pattern is
    certified on the hexagonal patch.
    """
    report = ChainReport(k=k)
    kag_doc = load_asset("kagome", k)
    kag_spec = LatticeSpec("kagome", tuple(kag_doc["source"]["dims"]))
    kag_pattern = MeasurementPattern.from_dict({"pattern": kag_doc["pattern"]})
    kag = lattice(kag_spec)

    found = _grow("triangular", kag, _TRI_TO_KAG, max(kag_spec.dims), max_size)
    if found is None:
        report.note = "no triangular patch found for the kagome link"
        return report
    tri_spec, tri_hit = found
    tri = lattice(tri_spec)
    found = _grow("hexagonal", tri, _HEX_TO_TRI, max(tri_spec.dims), 2 * max_size)
    if found is None:
        report.note = "no hexagonal patch found for the triangular link"
        return report
    hex_spec, hex_hit = found
    hexg = lattice(hex_spec)

    report.stages = [
        verify_transformation(hexg, hex_hit.pattern, tri_spec, hex_spec),
        verify_transformation(tri, tri_hit.pattern, kag_spec, tri_spec),
        verify_reduction(kag, kag_pattern, k, kag_spec),
    ]
    # a link's search embedding names, for each vertex of the next patch,
    # the source vertex that carries it
    tri_to_hex = hex_hit.embedding
    kag_to_hex = {v: tri_to_hex[t] for v, t in tri_hit.embedding.items()}
    steps = list(hex_hit.pattern.steps)
    steps += [PatternStep(tri_to_hex[s.vertex], s.basis, s.outcome) for s in tri_hit.pattern.steps]
    steps += [PatternStep(kag_to_hex[s.vertex], s.basis, s.outcome) for s in kag_pattern.steps]
    report.composite = verify_reduction(hexg, MeasurementPattern(tuple(steps)), k, hex_spec)
    return report
