"""Cut-rank, subcubic trees and exact width by min-max search.

A *width function* maps a qubit subset, given as a bitmask over ``0..m-1``,
to a nonnegative number and must be symmetric under complement. The width of
a subcubic tree is the largest value over the bipartitions its edges induce;
the width of the function is the smallest such value over all trees with the
qubits as leaves.

Trees with degree-2 internal nodes never need to be searched: suppressing
such a node merges two edges that induce the same bipartition, so the set of
bipartitions (and hence the max) is unchanged. Both solvers therefore range
over unrooted binary trees only.

Any tree is encoded by its *splits*: for each edge, the bitmask of the side
not containing qubit 0. The sorted tuple of splits identifies the tree and is
used as its canonical encoding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import InputError, ResourceError
from .gf2 import rank_of_rows
from .graph import Graph, _bits

__all__ = [
    "WidthFunction",
    "SubcubicTree",
    "WidthResult",
    "DP_CAP",
    "ENUM_CAP",
    "cut_rank",
    "cut_rank_function",
    "tree_width_value",
    "enumerate_subcubic_trees",
    "tree_count",
    "splits_to_tree",
    "exact_width",
    "rank_width",
    "grid_lower_bound",
    "treewidth_upper_bound",
]

WidthFunction = Callable[[int], float]

DP_CAP = 16
ENUM_CAP = 9


# ---------------------------------------------------------------------------
# cut-rank


def _subset_mask(n: int, subset: Iterable[int]) -> int:
    mask = 0
    for v in subset:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= v < n:
            raise InputError(f"vertex {v!r} not in [0, {n})")
        if (mask >> v) & 1:
            raise InputError(f"vertex {v} repeated in subset")
        mask |= 1 << int(v)
    return mask


def _cut_rank_mask(g: Graph, mask: int) -> int:
    comp = ((1 << g.n) - 1) & ~mask
    return rank_of_rows(g.nbr_mask(a) & comp for a in _bits(mask))


def cut_rank(g: Graph, subset: Iterable[int] | int) -> int:
    """GF(2) rank of the adjacency block between ``subset`` and its complement.

    ``subset`` may be an iterable of vertices or a bitmask.
    """
    if isinstance(subset, (int, np.integer)) and not isinstance(subset, bool):
        mask = int(subset)
        if mask < 0 or mask >> g.n:
            raise InputError(f"mask {mask} has bits outside [0, {g.n})")
    else:
        mask = _subset_mask(g.n, subset)
    return _cut_rank_mask(g, mask)


def cut_rank_function(g: Graph) -> WidthFunction:
    @lru_cache(maxsize=None)
    def w(mask: int) -> int:
        return _cut_rank_mask(g, mask)

    return w


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class SubcubicTree:
    """Unrooted tree of max degree 3 whose leaves carry the qubits ``0..m-1``.

    ``leaf_map`` sends leaf node ids to qubits. A single node with no edges is
    the degenerate tree for ``m = 1``.
    """

    nodes: int
    edges: tuple[tuple[int, int], ...]
    leaf_map: dict[int, int]

    def __post_init__(self) -> None:
        self.validate()

    @property
    def m(self) -> int:
        return len(self.leaf_map)

    def validate(self) -> None:
        n = self.nodes
        if n < 1:
            raise InputError("tree needs at least one node")
        if len(self.edges) != n - 1:
            raise InputError("a tree on n nodes has n-1 edges")
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise InputError(f"bad tree edge ({u}, {v})")
            adj[u].append(v)
            adj[v].append(u)
        if any(len(a) > 3 for a in adj):
            raise InputError("tree node with degree above 3")
        seen = {0}
        stack = [0]
        while stack:
            for v in adj[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != n:
            raise InputError("tree is not connected")
        leaves = {v for v in range(n) if len(adj[v]) <= 1}
        if set(self.leaf_map) != leaves:
            raise InputError("leaf_map must label exactly the leaves")
        if sorted(self.leaf_map.values()) != list(range(len(leaves))):
            raise InputError("leaf labels must be a bijection onto 0..m-1")

    def splits(self) -> list[int]:
        """Per edge (in ``edges`` order), the qubit mask on the side of ``edges[i][0]``."""
        adj: list[list[int]] = [[] for _ in range(self.nodes)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        out = []
        for u, v in self.edges:
            mask = 0
            stack = [(u, v)]
            while stack:
                x, parent = stack.pop()
                if x in self.leaf_map:
                    mask |= 1 << self.leaf_map[x]
                stack.extend((y, x) for y in adj[x] if y != parent)
            out.append(mask)
        return out

    def canonical(self) -> tuple[int, ...]:
        full = (1 << self.m) - 1
        norm = {s if not s & 1 else full ^ s for s in self.splits()}
        return tuple(sorted(norm))

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "edges": [list(e) for e in self.edges],
            "leaf_map": {str(k): v for k, v in sorted(self.leaf_map.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: dict) -> SubcubicTree:
        try:
            return cls(
                int(doc["nodes"]),
                tuple((int(u), int(v)) for u, v in doc["edges"]),
                {int(k): int(v) for k, v in doc["leaf_map"].items()},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed tree document: {exc}") from exc

    def to_dot(self, name: str = "T") -> str:
        lines = [f"graph {name} {{"]
        for v in range(self.nodes):
            if v in self.leaf_map:
                lines.append(f'  {v} [shape=box, label="q{self.leaf_map[v]}"];')
            else:
                lines.append(f'  {v} [shape=point];')
        lines += [f"  {u} -- {v};" for u, v in self.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"


def _trivial_tree(m: int) -> SubcubicTree:
    if m == 1:
        return SubcubicTree(1, (), {0: 0})
    return SubcubicTree(2, ((0, 1),), {0: 0, 1: 1})


def splits_to_tree(m: int, splits: Iterable[int]) -> SubcubicTree:
    """Rebuild the tree whose edges induce ``splits`` (masks avoiding qubit 0).

    Leaves are nodes ``0..m-1`` (node ``q`` carries qubit ``q``); internal
    nodes are numbered from ``m`` in increasing order of their cluster mask.
    """
    if m <= 2:
        return _trivial_tree(m)
    full = ((1 << m) - 1) & ~1
    clusters = sorted(set(splits) | {full} | {1 << q for q in range(1, m)})
    node_of: dict[int, int] = {}
    nxt = m
    for c in clusters:
        if c.bit_count() == 1:
            node_of[c] = c.bit_length() - 1
        else:
            node_of[c] = nxt
            nxt += 1
    edges = []
    for c in clusters:
        if c == full:
            parent_node = 0
        else:
            parent = min((d for d in clusters if d != c and d & c == c), key=lambda d: d.bit_count())
            parent_node = node_of[parent]
        edges.append((parent_node, node_of[c]))
    return SubcubicTree(nxt, tuple(sorted(edges)), {q: q for q in range(m)})


def tree_width_value(w: WidthFunction, tree: SubcubicTree) -> float:
    """Largest width-function value over the bipartitions induced by the tree's edges."""
    if not isinstance(tree, SubcubicTree):
        raise InputError("expected a SubcubicTree")
    return max((w(s) for s in tree.splits()), default=0)


def tree_count(m: int) -> int:
    """Number of unrooted binary trees with ``m`` labelled leaves: (2m-5)!!."""
    if m < 2:
        raise InputError("need m >= 2")
    return math.prod(range(1, 2 * m - 4, 2)) if m >= 3 else 1


def enumerate_subcubic_trees(m: int) -> Iterator[SubcubicTree]:
    """Every unrooted binary tree with leaves ``0..m-1``, each exactly once.

    Leaves are added one at a time by subdividing an existing edge; every
    tree arises from exactly one insertion history.
    """
    if m < 2:
        raise InputError("enumeration needs m >= 2")
    if m == 2:
        yield _trivial_tree(2)
        return
    leaf_map = {q: q for q in range(m)}

    def grow(edges: list[tuple[int, int]], k: int) -> Iterator[list[tuple[int, int]]]:
        if k == m:
            yield edges
            return
        x = m + k - 2  # next internal node id
        for i, (u, v) in enumerate(edges):
            new = edges[:i] + [(u, x), (x, v), (x, k)] + edges[i + 1 :]
            yield from grow(new, k + 1)

    for edges in grow([(m, 0), (m, 1), (m, 2)], 3):
        yield SubcubicTree(2 * m - 2, tuple(edges), leaf_map)


@lru_cache(maxsize=None)
def _split_table(m: int) -> np.ndarray:
    """All binary trees on ``m`` leaves as rows of sorted splits (masks avoiding qubit 0)."""
    rows: list[list[int]] = []

    def grow(splits: list[int], k: int) -> None:
        if k == m:
            rows.append(sorted(splits))
            return
        bit = 1 << k
        for i, s in enumerate(splits):
            new = [t | bit if (s & ~t == 0 and t != s) else t for t in splits]
            new[i] = s | bit
            new.append(s)
            new.append(bit)
            grow(new, k + 1)

    # star on leaves 0, 1, 2: splits {1}, {2}, {1, 2}
    grow([0b010, 0b100, 0b110], 3)
    return np.array(rows, dtype=np.int64)


# ---------------------------------------------------------------------------
# exact width


@dataclass
class WidthResult:
    value: float
    witness: SubcubicTree
    evaluations: int
    method: str = ""
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        v = self.value
        return {
            "value": int(v) if float(v).is_integer() else v,
            "method": self.method,
            "evaluations": self.evaluations,
            "witness": self.witness.to_dict(),
        }


class _Counted:
    def __init__(self, w: WidthFunction) -> None:
        self.w = w
        self.cache: dict[int, float] = {}

    def __call__(self, mask: int) -> float:
        v = self.cache.get(mask)
        if v is None:
            v = self.cache[mask] = self.w(mask)
        return v


def _solve_enumerate(w: _Counted, m: int, tol: float) -> tuple[float, tuple[int, ...]]:
    table = _split_table(m)
    masks = np.unique(table)
    lookup = np.zeros(1 << m, dtype=float)
    for s in masks.tolist():
        lookup[s] = w(s)
    per_tree = lookup[table].max(axis=1)
    best = per_tree.min()
    optimal = np.flatnonzero(per_tree <= best + tol)
    rows = table[optimal]
    # lexicographically smallest sorted-split encoding among optimal trees
    pick = np.lexsort(rows.T[::-1])[0]
    return float(best), tuple(int(x) for x in rows[pick])


def _solve_dp(w: _Counted, m: int) -> tuple[float, list[int]]:
    full = ((1 << m) - 1) & ~1
    g: dict[int, float] = {}
    choice: dict[int, int] = {}
    for s in range(2, full + 1, 2):
        if s & full != s:
            continue
        lb = w(s)
        if s & (s - 1) == 0:
            g[s] = lb
            continue
        low = s & -s
        rest = s ^ low
        best = math.inf
        best_t = 0
        t = rest
        # submasks containing the lowest bit of s, excluding s itself
        while True:
            part = t | low
            if part != s:
                v = max(g[part], g[s ^ part])
                if v < best:
                    best, best_t = v, part
                    if best <= lb:
                        break
            if t == 0:
                break
            t = (t - 1) & rest
        g[s] = max(lb, best)
        choice[s] = best_t
    clusters = []
    stack = [full]
    while stack:
        s = stack.pop()
        clusters.append(s)
        if s in choice:
            stack += [choice[s], s ^ choice[s]]
    return g[full], clusters


def exact_width(
    w: WidthFunction,
    m: int,
    method: str = "subset_dp",
    cap: int | None = None,
    tol: float = 1e-9,
) -> WidthResult:
    """Minimum over subcubic trees of the max width-function value on tree edges.

    ``method="enumerate"`` scores every binary tree (m <= 9) and returns the
    optimal tree with the smallest canonical encoding. ``method="subset_dp"``
    computes ``g(S) = min over splits S=T|U of max(w(S), g(T), g(U))`` over
    subsets avoiding qubit 0 and reads the answer at the full set.
    """
    if m < 1:
        raise InputError("m must be at least 1")
    if method not in ("enumerate", "subset_dp"):
        raise InputError(f"unknown method {method!r}")
    limit = cap if cap is not None else (ENUM_CAP if method == "enumerate" else DP_CAP)
    if m > limit:
        raise ResourceError(f"m = {m} exceeds the {method} cap of {limit}", cap=limit)
    counted = _Counted(w)
    if m == 1:
        return WidthResult(0, _trivial_tree(1), 0, method)
    if m == 2:
        return WidthResult(counted(0b10), _trivial_tree(2), 1, method)
    if method == "enumerate":
        value, splits = _solve_enumerate(counted, m, tol)
        tree = splits_to_tree(m, splits)
    else:
        value, clusters = _solve_dp(counted, m)
        tree = splits_to_tree(m, clusters)
    return WidthResult(value, tree, len(counted.cache), method)


def rank_width(g: Graph, method: str = "subset_dp", cap: int | None = None) -> WidthResult:
    """Exact rank width of ``g`` (the entanglement width of its graph state)."""
    if g.n < 1:
        raise InputError("rank width needs at least one vertex")
    res = exact_width(cut_rank_function(g), g.n, method=method, cap=cap)
    res.value = int(round(res.value))
    return res


# ---------------------------------------------------------------------------
# closed-form bounds


def grid_lower_bound(k: int) -> float:
    """log2(k + 2) - 1, a lower bound on the width of the k x k cluster state (k >= 3)."""
    if k < 3:
        raise InputError("grid lower bound holds only for k >= 3")
    return math.log2(k + 2) - 1


def treewidth_upper_bound(twd: int) -> int:
    """4 * 2**(twd - 1) + 1, an upper bound on width for tree width ``twd``."""
    if twd < 1:
        raise InputError("tree width must be at least 1")
    return 4 * 2 ** (twd - 1) + 1
