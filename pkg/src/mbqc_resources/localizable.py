"""Localizable entanglement of graph-state qubit pairs under Pauli strategies.

A strategy assigns X, Y or Z to every qubit other than the pair. Each
outcome leaves a pure two-qubit state; its concurrence, averaged with the
outcome probabilities, is the value of the strategy. The best strategy over
all ``3**(n-2)`` assignments is a lower bound on the localizable
entanglement, since general LOCC strategies are not searched.

Strategies are explored in lexicographic order (X < Y < Z, qubits
ascending) and the search stops at the first one that reaches 1, which
becomes the witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError, ResourceError
from .graph import Graph
from .oracle import StateVector, graph_state, measure, pauli_projectors, project_out

__all__ = [
    "LE_CAP",
    "UNIT_TOL",
    "LePairResult",
    "NleResult",
    "concurrence_pure",
    "strategy_value",
    "pauli_le_pair",
    "unit_le_relation",
    "n_le",
]

LE_CAP = 10
UNIT_TOL = 1e-9

_SQ2 = 1 / np.sqrt(2)
# rotate the Pauli eigenbasis onto the computational basis (+1 -> |0>)
_TO_Z = {
    "X": np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2,
    "Y": np.array([[1, -1j], [1, 1j]], dtype=complex) * _SQ2,
    "Z": np.eye(2, dtype=complex),
}


def concurrence_pure(a00, a01=None, a10=None, a11=None, tol: float = 1e-9) -> float:
    """Concurrence ``2|a00 a11 - a01 a10|`` of a normalized two-qubit pure state.

    Accepts four amplitudes or one length-4 sequence ordered ``00, 01, 10, 11``.
    """
    if a01 is None:
        amps = np.asarray(a00, dtype=complex).reshape(-1)
    else:
        amps = np.array([a00, a01, a10, a11], dtype=complex)
    if amps.shape != (4,):
        raise InputError("need exactly four amplitudes")
    norm = float(np.vdot(amps, amps).real)
    if abs(norm - 1) > tol:
        raise InputError(f"state is not normalized (norm^2 = {norm})")
    c = 2 * abs(amps[0] * amps[3] - amps[1] * amps[2])
    return float(min(c, 1.0))


@dataclass(frozen=True)
class LePairResult:
    pair: tuple[int, int]
    value: float
    witness: dict[int, str] | None
    strategies: int = 0

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "value": self.value,
            "unit": self.witness is not None,
            "witness": None if self.witness is None else {str(k): v for k, v in sorted(self.witness.items())},
            "strategies": self.strategies,
        }


@dataclass(frozen=True)
class NleResult:
    subset: tuple[int, ...]
    size: int
    relation: tuple[tuple[int, int], ...] = field(default=())

    def to_dict(self) -> dict:
        return {"subset": list(self.subset), "size": self.size, "unit_pairs": [list(p) for p in self.relation]}


def _check(g: Graph, a: int, b: int, cap: int) -> None:
    if g.n > cap:
        raise ResourceError(f"{g.n} qubits exceeds the localizable-entanglement cap of {cap}", cap=cap)
    for v in (a, b):
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < g.n:
            raise InputError(f"vertex {v!r} out of range [0, {g.n})")
    if a == b:
        raise InputError("pair must consist of two distinct qubits")


def _pair_sum(t: np.ndarray, m: int, a: int, b: int) -> float:
    """Sum over outcomes of ``2|det|`` of the (a, b) blocks: the weighted concurrence."""
    ax_a, ax_b = m - 1 - a, m - 1 - b
    blocks = np.moveaxis(t, (ax_a, ax_b), (-2, -1)).reshape(-1, 2, 2)
    det = blocks[:, 0, 0] * blocks[:, 1, 1] - blocks[:, 0, 1] * blocks[:, 1, 0]
    return float(2 * np.abs(det).sum())


def pauli_le_pair(g: Graph, a: int, b: int, cap: int = LE_CAP) -> LePairResult:
    """Best outcome-averaged concurrence between ``a`` and ``b`` over Pauli strategies."""
    _check(g, a, b, cap)
    m = g.n
    others = [v for v in range(m) if v not in (a, b)]
    psi = graph_state(g, cap=max(cap, m)).tensor()
    best = -1.0
    count = 0
    found: dict[int, str] | None = None
    choice: list[str] = []

    def dfs(t: np.ndarray, depth: int) -> bool:
        nonlocal best, count, found
        if depth == len(others):
            count += 1
            val = _pair_sum(t, m, a, b)
            if val > best:
                best = val
            if val >= 1 - UNIT_TOL:
                found = dict(zip(others, choice))
                return True
            return False
        ax = m - 1 - others[depth]
        for p in "XYZ":
            rotated = np.moveaxis(np.tensordot(_TO_Z[p], t, axes=([1], [ax])), 0, ax)
            choice.append(p)
            stop = dfs(rotated, depth + 1)
            choice.pop()
            if stop:
                return True
        return False

    dfs(psi, 0)
    value = min(best, 1.0)
    lo, hi = min(a, b), max(a, b)
    return LePairResult((lo, hi), 1.0 if found is not None else value, found, count)


def strategy_value(g: Graph, a: int, b: int, strategy: dict[int, str], cap: int = LE_CAP) -> float:
    """Replay one strategy by explicit projective measurement, outcome by outcome."""
    _check(g, a, b, cap)
    others = sorted(strategy)
    if sorted(others) != [v for v in range(g.n) if v not in (a, b)]:
        raise InputError("strategy must assign a basis to every qubit outside the pair")
    total = 0.0
    for outcomes in itertools.product((0, 1), repeat=len(others)):
        state: StateVector | None = graph_state(g, cap=max(cap, g.n))
        prob = 1.0
        labels = list(range(g.n))
        for v, o in zip(others, outcomes):
            q = labels.index(v)
            p, post = measure(state, q, pauli_projectors(strategy[v]))[o]
            if post is None:
                prob = 0.0
                break
            prob *= p
            vec = np.linalg.eigh(pauli_projectors(strategy[v])[o])[1][:, -1]
            state = project_out(post, q, vec)
            labels.pop(q)
        if prob == 0.0:
            continue
        # concurrence is symmetric in the two qubits, so amplitude order is immaterial
        total += prob * concurrence_pure(state.amplitudes)
    return total


def unit_le_relation(g: Graph, cap: int = LE_CAP) -> list[tuple[int, int]]:
    """All pairs with unit Pauli-localizable entanglement."""
    return [(a, b) for a, b in itertools.combinations(range(g.n), 2) if pauli_le_pair(g, a, b, cap).witness is not None]


def n_le(g: Graph, cap: int = LE_CAP) -> NleResult:
    """Largest qubit subset whose pairs all have unit Pauli-localizable entanglement.

    Exact maximum clique by brute force; ties go to the lexicographically
    smallest subset.
    """
    if g.n > cap:
        raise ResourceError(f"{g.n} qubits exceeds the localizable-entanglement cap of {cap}", cap=cap)
    if g.n == 0:
        return NleResult((), 0, ())
    rel = unit_le_relation(g, cap) if g.n >= 2 else []
    adj = [0] * g.n
    for a, b in rel:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    for size in range(g.n, 0, -1):
        for subset in itertools.combinations(range(g.n), size):
            if all((adj[u] >> v) & 1 for u, v in itertools.combinations(subset, 2)):
                return NleResult(subset, size, tuple(rel))
    raise AssertionError("singletons always qualify")
