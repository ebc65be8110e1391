"""Simple undirected graphs, planar lattice patches, isomorphism and I/O.

Vertices are ``0..n-1``. Adjacency is a symmetric :class:`BitMatrix` whose
row ``a`` is the neighbourhood bitmask of ``a``.

Lattice vertex indexing is row-major by coordinates: vertices are sorted by
``(y, x)``. All patches have open boundaries.

=============  =====  ====================================================
kind           dims   layout
=============  =====  ====================================================
``path``       (n,)   0-1-...-(n-1) along the x axis
``cycle``      (n,)   path plus the closing edge, n >= 3
``star``       (n,)   centre 0 joined to 1..n-1
``grid``       (r,c)  site (x, y), x < c, y < r, 4-neighbour bonds
``hexagonal``  (r,c)  brick wall: full rows, rung (x,y)-(x,y+1) iff x+y even
``triangular`` (r,c)  site (i, j) at (i + j/2, j); bonds (1,0), (0,1), (-1,1)
``kagome``     (r,c)  midpoints of the bonds of ``triangular(r, c)``, joined
                      when the two bonds bound a common triangle
=============  =====  ====================================================
"""

from __future__ import annotations

import json
from fractions import Fraction
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .errors import InputError
from .gf2 import BitMatrix

__all__ = [
    "Graph",
    "GraphFormatError",
    "LatticeSpec",
    "LATTICE_KINDS",
    "make_graph",
    "lattice",
    "is_isomorphic",
    "to_json",
    "from_json",
    "to_dot",
    "find_induced_subgraph",
    "induced_embedding",
    "cell_coordinates",
]

LATTICE_KINDS = ("path", "cycle", "star", "grid", "hexagonal", "triangular", "kagome")
_ONE_DIM = {"path", "cycle", "star"}


class GraphFormatError(InputError):
    """Malformed graph document. ``position`` locates the problem."""

    def __init__(self, message: str, position: Any = None) -> None:
        where = f" at {position}" if position is not None else ""
        super().__init__(f"{message}{where}")
        self.position = position


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: BitMatrix
    coords: tuple[tuple[float, float], ...] | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        adj = self.adjacency
        if adj.rows != self.n or adj.cols != self.n:
            raise InputError("adjacency must be n x n")
        for a, row in enumerate(adj.data):
            if (row >> a) & 1:
                raise InputError(f"self-loop at vertex {a}")
            r = row
            while r:
                low = r & -r
                b = low.bit_length() - 1
                if not (adj.data[b] >> a) & 1:
                    raise InputError(f"adjacency not symmetric at ({a}, {b})")
                r ^= low
        if self.coords is not None and len(self.coords) != self.n:
            raise InputError("coords must have one entry per vertex")
        if self.labels is not None and len(self.labels) != self.n:
            raise InputError("labels must have one entry per vertex")

    def nbr_mask(self, a: int) -> int:
        return self.adjacency.data[a]

    def neighbors(self, a: int) -> list[int]:
        self._check_vertex(a)
        return _bits(self.adjacency.data[a])

    def degree(self, a: int) -> int:
        return self.adjacency.data[a].bit_count()

    def has_edge(self, a: int, b: int) -> bool:
        return bool((self.adjacency.data[a] >> b) & 1)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for a, row in enumerate(self.adjacency.data):
            out.extend((a, b) for b in _bits(row >> (a + 1) << (a + 1)))
        return out

    @property
    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.adjacency.data) // 2

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self.adjacency.data]

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for a in _bits(frontier):
                nxt |= self.adjacency.data[a]
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.n) - 1

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with old vertex ``v`` renamed to ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise InputError("perm must be a permutation of range(n)")
        edges = [(perm[a], perm[b]) for a, b in self.edges()]
        coords = labels = None
        if self.coords is not None:
            c = [None] * self.n
            for v, p in enumerate(perm):
                c[p] = self.coords[v]
            coords = tuple(c)
        if self.labels is not None:
            lab = [None] * self.n
            for v, p in enumerate(perm):
                lab[p] = self.labels[v]
            labels = tuple(lab)
        return make_graph(self.n, edges, coords=coords, labels=labels)

    def induced(self, keep: Sequence[int]) -> tuple[Graph, dict[int, int]]:
        """Induced subgraph on ``keep`` (order preserved) and the old->new map."""
        mapping = {v: i for i, v in enumerate(keep)}
        if len(mapping) != len(keep) or any(not 0 <= v < self.n for v in keep):
            raise InputError("keep must list distinct in-range vertices")
        rows = []
        for v in keep:
            row = self.adjacency.data[v]
            word = 0
            for i, u in enumerate(keep):
                if (row >> u) & 1:
                    word |= 1 << i
            rows.append(word)
        coords = tuple(self.coords[v] for v in keep) if self.coords is not None else None
        labels = tuple(self.labels[v] for v in keep) if self.labels is not None else None
        g = Graph(len(keep), BitMatrix(len(keep), len(keep), tuple(rows)), coords, labels)
        return g, mapping

    def same_edges(self, other: Graph) -> bool:
        return self.n == other.n and self.adjacency.data == other.adjacency.data

    def _check_vertex(self, a: int) -> None:
        if not isinstance(a, int) or not 0 <= a < self.n:
            raise InputError(f"vertex {a!r} out of range [0, {self.n})")


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def make_graph(
    n: int,
    edges: Iterable[Sequence[int]],
    coords: Sequence[Sequence[float]] | None = None,
    labels: Sequence[str] | None = None,
) -> Graph:
    """Graph on ``n`` vertices with the given edges; duplicates collapse."""
    if n < 0:
        raise InputError("vertex count must be nonnegative")
    rows = [0] * n
    for e in edges:
        u, v = e
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"edge ({u}, {v}) has a vertex outside [0, {n})")
        if u == v:
            raise InputError(f"self-loop ({u}, {v}) not allowed")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    c = tuple((x, y) for x, y in coords) if coords is not None else None
    lab = tuple(str(s) for s in labels) if labels is not None else None
    return Graph(n, BitMatrix(n, n, tuple(rows)), c, lab)


@dataclass(frozen=True)
class LatticeSpec:
    kind: str
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in LATTICE_KINDS:
            raise InputError(f"unknown lattice kind {self.kind!r}; choose from {LATTICE_KINDS}")
        want = 1 if self.kind in _ONE_DIM else 2
        if len(self.dims) != want:
            raise InputError(f"{self.kind} takes {want} dimension(s), got {len(self.dims)}")
        if any(int(d) != d or d < 1 for d in self.dims):
            raise InputError(f"dimensions must be positive integers, got {self.dims}")
        if self.kind == "cycle" and self.dims[0] < 3:
            raise InputError("cycle needs at least 3 vertices")


def _from_sites(sites: dict[tuple, tuple[float, float]], bonds: Iterable[tuple]) -> Graph:
    order = sorted(sites, key=lambda s: (sites[s][1], sites[s][0]))
    index = {s: i for i, s in enumerate(order)}
    edges = [(index[a], index[b]) for a, b in bonds]
    return make_graph(len(order), edges, coords=[sites[s] for s in order])


def lattice(spec: LatticeSpec | str, dims: Sequence[int] | None = None) -> Graph:
    """Generate a lattice patch with planar coordinates attached.

    Accepts a :class:`LatticeSpec` or ``lattice("grid", (3, 3))``.
    """
    if isinstance(spec, str):
        spec = LatticeSpec(spec, tuple(dims or ()))
    kind, d = spec.kind, spec.dims

    if kind in ("path", "cycle"):
        n = d[0]
        edges = [(i, i + 1) for i in range(n - 1)]
        if kind == "cycle":
            edges.append((n - 1, 0))
        return make_graph(n, edges, coords=[(i, 0) for i in range(n)])

    if kind == "star":
        n = d[0]
        coords = [(0, 0)] + [(1, i) for i in range(n - 1)]
        return make_graph(n, [(0, i) for i in range(1, n)], coords=coords)

    rows, cols = d
    if kind == "grid":
        sites = {(x, y): (x, y) for y in range(rows) for x in range(cols)}
        bonds = [((x, y), (x + 1, y)) for y in range(rows) for x in range(cols - 1)]
        bonds += [((x, y), (x, y + 1)) for y in range(rows - 1) for x in range(cols)]
        return _from_sites(sites, bonds)

    if kind == "hexagonal":
        sites = {(x, y): (x, y) for y in range(rows) for x in range(cols)}
        bonds = [((x, y), (x + 1, y)) for y in range(rows) for x in range(cols - 1)]
        bonds += [
            ((x, y), (x, y + 1))
            for y in range(rows - 1)
            for x in range(cols)
            if (x + y) % 2 == 0
        ]
        return _from_sites(sites, bonds)

    tri_sites = {(i, j): (i + j / 2, j) for j in range(rows) for i in range(cols)}
    tri_bonds = []
    for j in range(rows):
        for i in range(cols):
            for di, dj in ((1, 0), (0, 1), (-1, 1)):
                if (i + di, j + dj) in tri_sites:
                    tri_bonds.append(((i, j), (i + di, j + dj)))
    if kind == "triangular":
        return _from_sites(tri_sites, tri_bonds)

    # kagome: medial graph of the triangular patch
    faces = []
    for j in range(rows - 1):
        for i in range(cols):
            a, b, c = (i, j), (i + 1, j), (i, j + 1)
            if b in tri_sites and c in tri_sites:
                faces.append((a, b, c))
            a2, b2 = (i, j + 1), (i - 1, j + 1)
            if b2 in tri_sites:
                faces.append(((i, j), a2, b2))
    bond_key = {frozenset(e): e for e in tri_bonds}
    sites = {}
    for e in tri_bonds:
        (x0, y0), (x1, y1) = tri_sites[e[0]], tri_sites[e[1]]
        sites[frozenset(e)] = ((x0 + x1) / 2, (y0 + y1) / 2)
    bonds = []
    for a, b, c in faces:
        sides = [frozenset((a, b)), frozenset((b, c)), frozenset((a, c))]
        assert all(s in bond_key for s in sides)
        bonds += [(sides[0], sides[1]), (sides[1], sides[2]), (sides[0], sides[2])]
    return _from_sites(sites, bonds)


# ---------------------------------------------------------------------------
# isomorphism


def _refine(graphs: Sequence[Graph]) -> list[list[int]]:
    """Joint colour refinement, seeded by degree, over several graphs."""
    colors = [g.degrees() for g in graphs]
    n_classes = len({c for cs in colors for c in cs})
    while True:
        sigs = [
            [(cs[v], tuple(sorted(cs[u] for u in _bits(g.nbr_mask(v))))) for v in range(g.n)]
            for g, cs in zip(graphs, colors)
        ]
        palette = {s: i for i, s in enumerate(sorted({s for ss in sigs for s in ss}))}
        colors = [[palette[s] for s in ss] for ss in sigs]
        if len(palette) == n_classes:
            return colors
        n_classes = len(palette)


def is_isomorphic(g: Graph, h: Graph) -> dict[int, int] | None:
    """Return a bijection ``g -> h`` preserving adjacency both ways, or None.

    Colour refinement prunes candidates; a backtracking search over a
    connectivity-first vertex order finishes the job. Deterministic.
    """
    if g.n != h.n or g.num_edges != h.num_edges:
        return None
    if sorted(g.degrees()) != sorted(h.degrees()):
        return None
    if g.n == 0:
        return {}
    cg, ch = _refine([g, h])
    if sorted(cg) != sorted(ch):
        return None

    class_size: dict[int, int] = {}
    for c in cg:
        class_size[c] = class_size.get(c, 0) + 1
    by_color: dict[int, list[int]] = {}
    for v, c in enumerate(ch):
        by_color.setdefault(c, []).append(v)

    # connectivity-first order: prefer vertices with many placed neighbours
    order: list[int] = []
    placed = 0
    remaining = set(range(g.n))
    while remaining:
        best = min(
            remaining,
            key=lambda v: (-(g.nbr_mask(v) & placed).bit_count(), class_size[cg[v]], v),
        )
        order.append(best)
        placed |= 1 << best
        remaining.discard(best)

    fwd: dict[int, int] = {}
    used = 0

    def extend(depth: int) -> bool:
        nonlocal used
        if depth == len(order):
            return True
        v = order[depth]
        nv = g.nbr_mask(v)
        for w in by_color[cg[v]]:
            if (used >> w) & 1:
                continue
            nw = h.nbr_mask(w)
            if any(((nv >> u) & 1) != ((nw >> fu) & 1) for u, fu in fwd.items()):
                continue
            fwd[v] = w
            used |= 1 << w
            if extend(depth + 1):
                return True
            del fwd[v]
            used &= ~(1 << w)
        return False

    if extend(0):
        return dict(sorted(fwd.items()))
    return None


# ---------------------------------------------------------------------------
# serialization


def to_dict(g: Graph) -> dict[str, Any]:
    doc: dict[str, Any] = {"n": g.n, "edges": [list(e) for e in g.edges()]}
    if g.coords is not None:
        doc["coords"] = [[_num(x), _num(y)] for x, y in g.coords]
    if g.labels is not None:
        doc["labels"] = list(g.labels)
    return doc


def _num(x: float) -> float | int:
    return int(x) if float(x).is_integer() else float(x)


def to_json(g: Graph) -> str:
    return json.dumps(to_dict(g), separators=(",", ":"))


def from_dict(doc: Any) -> Graph:
    if not isinstance(doc, dict):
        raise GraphFormatError("graph document must be an object", "$")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise GraphFormatError("'n' must be a nonnegative integer", "$.n")
    edges = doc.get("edges", [])
    if not isinstance(edges, list):
        raise GraphFormatError("'edges' must be a list", "$.edges")
    for i, e in enumerate(edges):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in e)
        ):
            raise GraphFormatError("edge must be a pair of integers", f"$.edges[{i}]")
        if e[0] == e[1]:
            raise GraphFormatError(f"self-loop {e}", f"$.edges[{i}]")
        if not (0 <= e[0] < n and 0 <= e[1] < n):
            raise GraphFormatError(f"edge {e} out of range", f"$.edges[{i}]")
    coords = doc.get("coords")
    if coords is not None:
        if not isinstance(coords, list) or len(coords) != n:
            raise GraphFormatError("'coords' must list one [x, y] per vertex", "$.coords")
        for i, c in enumerate(coords):
            if not isinstance(c, list) or len(c) != 2 or not all(isinstance(x, (int, float)) for x in c):
                raise GraphFormatError("coordinate must be [x, y]", f"$.coords[{i}]")
    labels = doc.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise GraphFormatError("'labels' must list one string per vertex", "$.labels")
    return make_graph(n, edges, coords=coords, labels=labels)


def from_json(text: str) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno} (char {exc.pos})") from exc
    return from_dict(doc)


def to_dot(g: Graph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in range(g.n):
        attrs = []
        if g.labels is not None:
            attrs.append(f'label="{g.labels[v]}"')
        if g.coords is not None:
            x, y = g.coords[v]
            attrs.append(f'pos="{_num(x)},{_num(y)}!"')
        lines.append(f"  {v}" + (f" [{', '.join(attrs)}];" if attrs else ";"))
    for a, b in g.edges():
        lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def find_induced_subgraph(host: Graph, pattern: Graph, alive: int | None = None) -> dict[int, int] | None:
    """Embed ``pattern`` as an *induced* subgraph of ``host``.

    Returns ``{pattern vertex: host vertex}`` or None. ``alive`` optionally
    restricts the host to a vertex bitmask. Pattern vertices are placed in a
    connectivity-first order and host candidates tried in ascending order, so
    the result is deterministic.
    """
    if alive is None:
        alive = (1 << host.n) - 1
    return induced_embedding([host.nbr_mask(v) for v in range(host.n)], alive, pattern)


def induced_embedding(rows: Sequence[int], alive: int, pattern: Graph) -> dict[int, int] | None:
    """Same as :func:`find_induced_subgraph` on raw neighbourhood masks."""
    if pattern.n == 0:
        return {}
    if pattern.n > alive.bit_count():
        return None
    rows = [r & alive for r in rows]
    # cheap degree screen before backtracking
    have = sorted((rows[v].bit_count() for v in _bits(alive)), reverse=True)
    need_sorted = sorted(pattern.degrees(), reverse=True)
    if any(h < d for h, d in zip(have, need_sorted)):
        return None
    order: list[int] = []
    placed = 0
    for _ in range(pattern.n):
        v = min(
            (u for u in range(pattern.n) if not (placed >> u) & 1),
            key=lambda u: (-(pattern.nbr_mask(u) & placed).bit_count(), -pattern.degree(u), u),
        )
        order.append(v)
        placed |= 1 << v
    need = pattern.degrees()
    pmask = [pattern.nbr_mask(v) for v in range(pattern.n)]
    fwd: dict[int, int] = {}
    used = 0

    def extend(depth: int) -> bool:
        nonlocal used
        if depth == len(order):
            return True
        v = order[depth]
        pv = pmask[v]
        anchor = next((u for u in fwd if (pv >> u) & 1), None)
        cand = rows[fwd[anchor]] if anchor is not None else alive
        cand &= ~used
        for w in _bits(cand):
            if rows[w].bit_count() < need[v]:
                continue
            if any(((pv >> u) & 1) != ((rows[w] >> fu) & 1) for u, fu in fwd.items()):
                continue
            fwd[v] = w
            used |= 1 << w
            if extend(depth + 1):
                return True
            del fwd[v]
            used &= ~(1 << w)
        return False

    return dict(sorted(fwd.items())) if extend(0) else None


def cell_coordinates(g: Graph, kind: str) -> list[tuple[int, int, int]]:
    """Recover ``(i, j, sublattice)`` for every vertex of a :func:`lattice` patch.

    Inverts the coordinate maps used by the generator. For ``kagome`` the
    sublattice is 0 for midpoints of (1,0) bonds, 1 for (0,1) bonds and 2
    for (-1,1) bonds, and ``(i, j)`` is the bond's lower-left end.
    """
    if g.coords is None:
        raise InputError("graph has no coordinates")
    if kind not in LATTICE_KINDS:
        raise InputError(f"unknown lattice kind {kind!r}")
    out = []
    for x, y in g.coords:
        fx, fy = Fraction(x).limit_denominator(8), Fraction(y).limit_denominator(8)
        if kind == "triangular":
            i = fx - fy / 2
            cell = (i, fy, 0)
        elif kind == "kagome":
            if fy.denominator == 1:
                cell = (fx - fy / 2 - Fraction(1, 2), fy, 0)
            else:
                j = fy - Fraction(1, 2)
                r = fx - j / 2
                if (r - Fraction(1, 4)).denominator == 1:
                    cell = (r - Fraction(1, 4), j, 1)
                else:
                    cell = (r + Fraction(1, 4), j, 2)
        else:
            cell = (fx, fy, 0)
        if cell[0].denominator != 1 or cell[1].denominator != 1:
            raise InputError(f"coordinate ({x}, {y}) is not a {kind} site")
        out.append((int(cell[0]), int(cell[1]), cell[2]))
    return out
