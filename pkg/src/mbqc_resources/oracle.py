"""Dense state-vector simulator used as ground truth for the graph rules.

Qubit ``q`` is bit ``q`` (lowest order first) of the amplitude index. This
module deliberately knows nothing about stabilizer tableaux: it builds graph
states from controlled-Z phases and measures by explicit projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .calculus import TAG_EXPONENT, MeasurementPattern, apply_pattern, measure_pauli
from .errors import InputError, ResourceError
from .graph import Graph

__all__ = [
    "DEFAULT_QUBIT_CAP",
    "PAULI",
    "StateVector",
    "graph_state",
    "deformed_state",
    "product_state",
    "apply_1q",
    "measure",
    "pauli_projectors",
    "project_out",
    "reduced_density_matrix",
    "entanglement_entropy",
    "fidelity",
    "stabilizer_deviation",
    "RuleReport",
    "verify_rule",
    "verify_pattern",
]

DEFAULT_QUBIT_CAP = 14
RULE_TOL = 1e-9

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_EIGVECS = {
    ("X", 1): np.array([1, 1], dtype=complex) / np.sqrt(2),
    ("X", -1): np.array([1, -1], dtype=complex) / np.sqrt(2),
    ("Y", 1): np.array([1, 1j], dtype=complex) / np.sqrt(2),
    ("Y", -1): np.array([1, -1j], dtype=complex) / np.sqrt(2),
    ("Z", 1): np.array([1, 0], dtype=complex),
    ("Z", -1): np.array([0, 1], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class StateVector:
    m: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (1 << self.m,):
            raise InputError(f"expected {1 << self.m} amplitudes for {self.m} qubits")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """Amplitudes as an ``m``-axis tensor; qubit ``q`` lives on axis ``m-1-q``."""
        return self.amplitudes.reshape((2,) * self.m) if self.m else self.amplitudes.reshape(())

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "re": [float(x) for x in self.amplitudes.real],
            "im": [float(x) for x in self.amplitudes.imag],
        }


def _check_cap(m: int, cap: int) -> None:
    if m > cap:
        raise ResourceError(f"{m} qubits exceeds the state-vector cap of {cap}", cap=cap)


def _axis(m: int, q: int) -> int:
    return m - 1 - q


def _check_qubit(state: StateVector, q: int) -> None:
    if not isinstance(q, (int, np.integer)) or not 0 <= q < state.m:
        raise InputError(f"qubit {q!r} out of range [0, {state.m})")


def _bit_table(m: int) -> np.ndarray:
    idx = np.arange(1 << m, dtype=np.int64)
    return (idx[None, :] >> np.arange(m, dtype=np.int64)[:, None]) & 1


def product_state(vectors: Sequence[np.ndarray]) -> StateVector:
    """Tensor product with ``vectors[0]`` on qubit 0."""
    amps = np.ones(1, dtype=complex)
    for v in vectors:
        amps = np.kron(np.asarray(v, dtype=complex), amps)
    return StateVector(len(vectors), amps)


def graph_state(g: Graph, cap: int = DEFAULT_QUBIT_CAP) -> StateVector:
    """CZ on every edge applied to ``|+>^m``."""
    _check_cap(g.n, cap)
    m = g.n
    bits = _bit_table(m)
    parity = np.zeros(1 << m, dtype=np.int64)
    for a, b in g.edges():
        parity ^= bits[a] & bits[b]
    amps = np.where(parity == 1, -1.0, 1.0).astype(complex) / np.sqrt(1 << m)
    return StateVector(m, amps)


def deformed_state(g: Graph, lam: float, cap: int = DEFAULT_QUBIT_CAP) -> StateVector:
    """diag(1, lam) on every qubit of the graph state, renormalized."""
    if not 0 < lam <= 1:
        raise InputError(f"lambda must lie in (0, 1], got {lam}")
    base = graph_state(g, cap)
    weight = lam ** _bit_table(g.n).sum(axis=0)
    amps = base.amplitudes * weight
    return StateVector(g.n, amps / np.linalg.norm(amps))


def apply_1q(state: StateVector, q: int, u: np.ndarray) -> StateVector:
    _check_qubit(state, q)
    ax = _axis(state.m, q)
    t = np.tensordot(np.asarray(u, dtype=complex), state.tensor(), axes=([1], [ax]))
    t = np.moveaxis(t, 0, ax)
    return StateVector(state.m, t.reshape(-1))


def apply_pauli_string(state: StateVector, ops: dict[int, str]) -> StateVector:
    for q, p in ops.items():
        state = apply_1q(state, q, PAULI[p])
    return state


def measure(
    state: StateVector, qubit: int, operators: Sequence[np.ndarray], tol: float = 1e-10
) -> list[tuple[float, StateVector | None]]:
    """Apply a single-qubit measurement given by Kraus operators.

    Returns ``(probability, post_state)`` per operator; the post-state is
    normalized, or None for a zero-probability branch.
    """
    _check_qubit(state, qubit)
    ops = [np.asarray(k, dtype=complex) for k in operators]
    if not ops or any(k.shape != (2, 2) for k in ops):
        raise InputError("operators must be a nonempty list of 2x2 matrices")
    total = sum(k.conj().T @ k for k in ops)
    if not np.allclose(total, np.eye(2), atol=tol, rtol=0):
        raise InputError("operators do not satisfy sum M^dagger M = I")
    out = []
    for k in ops:
        post = apply_1q(state, qubit, k)
        p = float(np.vdot(post.amplitudes, post.amplitudes).real)
        if p <= 1e-15:
            out.append((0.0, None))
        else:
            out.append((p, StateVector(state.m, post.amplitudes / np.sqrt(p))))
    return out


def pauli_projectors(basis: str, frame: np.ndarray | None = None) -> list[np.ndarray]:
    """Projectors ``[(1+P)/2, (1-P)/2]``, optionally conjugated as ``U P U^dagger``."""
    p = PAULI[basis]
    if frame is not None:
        p = frame @ p @ frame.conj().T
    eye = np.eye(2, dtype=complex)
    return [(eye + p) / 2, (eye - p) / 2]


def project_out(state: StateVector, qubit: int, vec: np.ndarray) -> StateVector:
    """Contract ``qubit`` with ``<vec|``; remaining qubits keep their order."""
    _check_qubit(state, qubit)
    ax = _axis(state.m, qubit)
    t = np.tensordot(np.asarray(vec, dtype=complex).conj(), state.tensor(), axes=([0], [ax]))
    return StateVector(state.m - 1, np.asarray(t).reshape(-1))


def _split(state: StateVector, subset: Sequence[int]) -> np.ndarray:
    a = sorted(set(subset))
    rest = [q for q in range(state.m) if q not in a]
    axes = [_axis(state.m, q) for q in a] + [_axis(state.m, q) for q in rest]
    return np.transpose(state.tensor(), axes).reshape(1 << len(a), -1)


def reduced_density_matrix(state: StateVector, subset: Sequence[int]) -> np.ndarray:
    """Reduced state on ``subset``; index bits follow ``sorted(subset)``, most significant first."""
    for q in subset:
        _check_qubit(state, q)
    mat = _split(state, subset)
    return mat @ mat.conj().T


def entanglement_entropy(state: StateVector, subset: Sequence[int]) -> float:
    """Von Neumann entropy in bits across ``(subset, complement)``."""
    a = set(subset)
    for q in a:
        _check_qubit(state, q)
    if not a or len(a) == state.m:
        raise InputError("subset must be a proper nonempty subset of the qubits")
    s = np.linalg.svd(_split(state, sorted(a)), compute_uv=False)
    p = s**2
    p = p[p > 1e-12]
    return float(-(p * np.log2(p)).sum()) + 0.0


def fidelity(s1: StateVector, s2: StateVector) -> float:
    """``|<s1|s2>|``."""
    if s1.m != s2.m:
        raise InputError(f"qubit counts differ: {s1.m} vs {s2.m}")
    return float(abs(np.vdot(s1.amplitudes, s2.amplitudes)))


def stabilizer_deviation(g: Graph, state: StateVector | None = None) -> float:
    """Max over vertices ``a`` of ``|| K_a |psi> - |psi> ||_inf``."""
    if state is None:
        state = graph_state(g)
    worst = 0.0
    for a in range(g.n):
        ops = {a: "X"}
        ops.update({b: "Z" for b in g.neighbors(a)})
        k = apply_pauli_string(state, ops)
        worst = max(worst, float(np.max(np.abs(k.amplitudes - state.amplitudes), initial=0.0)))
    return worst


def _phase_gate(exponent: int) -> np.ndarray:
    return np.diag([1.0, 1j**exponent]).astype(complex)


@dataclass(frozen=True)
class RuleReport:
    fidelity: float
    probability: float
    passed: bool
    tol: float = RULE_TOL

    def to_dict(self) -> dict:
        return {"fidelity": self.fidelity, "probability": self.probability, "passed": self.passed, "tol": self.tol}


def _undo_and_compare(state: StateVector, h: Graph, exponents: dict[int, int], prob: float) -> RuleReport:
    for v, k in exponents.items():
        if k % 4:
            state = apply_1q(state, v, _phase_gate(-k))
    f = fidelity(state, graph_state(h, cap=max(h.n, 1)))
    return RuleReport(f, prob, abs(f - 1) < RULE_TOL)


def verify_rule(g: Graph, a: int, basis: str, outcome: int, cap: int = DEFAULT_QUBIT_CAP) -> RuleReport:
    """Check one measurement rule against projective simulation."""
    h, rec = measure_pauli(g, a, basis, outcome)
    psi = graph_state(g, cap)
    branch = 0 if outcome == 1 else 1
    prob, post = measure(psi, a, pauli_projectors(basis))[branch]
    if post is None:
        return RuleReport(0.0, prob, False)
    reduced = project_out(post, a, _EIGVECS[(basis, outcome)])
    return _undo_and_compare(reduced, h, {v: rec.exponent(v) for v in rec.tags}, prob)


def verify_pattern(g: Graph, pattern: MeasurementPattern, cap: int = DEFAULT_QUBIT_CAP) -> RuleReport:
    """Simulate a whole pattern, measuring each qubit in its current Pauli frame.

    The reported probability is the joint probability of the stated outcomes.
    """
    h, rec, _ = apply_pattern(g, pattern)
    state = graph_state(g, cap)
    where = {v: v for v in range(g.n)}
    joint = 1.0
    for step in rec.measured:
        k = sum(TAG_EXPONENT[t] for t in step.frame) % 4
        u = _phase_gate(k)
        q = where[step.vertex]
        branch = 0 if step.outcome == 1 else 1
        prob, post = measure(state, q, pauli_projectors(step.basis, u))[branch]
        if post is None:
            return RuleReport(0.0, 0.0, False)
        joint *= prob
        state = project_out(post, q, u @ _EIGVECS[(step.basis, step.outcome)])
        where = {o: (i if i < q else i - 1) for o, i in where.items() if o != step.vertex}
    return _undo_and_compare(state, h, {v: rec.exponent(v) for v in rec.tags}, joint)
