import math
import random

import numpy as np
import pytest

from mbqc_resources.errors import InputError, ResourceError
from mbqc_resources.graph import lattice, make_graph
from mbqc_resources.oracle import (
    PAULI,
    apply_1q,
    deformed_state,
    entanglement_entropy,
    fidelity,
    graph_state,
    measure,
    pauli_projectors,
    product_state,
    reduced_density_matrix,
    stabilizer_deviation,
)
from mbqc_resources.width import cut_rank

from conftest import random_graph


def dense_graph_state(g):
    # explicit |+>^n then a diagonal CZ per edge, qubit q = bit q of the index
    n = g.n
    psi = np.ones(1 << n, dtype=complex) / math.sqrt(1 << n)
    for a, b in g.edges():
        cz = np.array([-1 if (i >> a) & 1 and (i >> b) & 1 else 1 for i in range(1 << n)])
        psi = cz * psi
    return psi


def test_graph_state_matches_dense_construction(rng):
    for _ in range(30):
        g = random_graph(rng, rng.randint(1, 7))
        assert np.allclose(graph_state(g).amplitudes, dense_graph_state(g))


def test_bell_pair():
    psi = graph_state(make_graph(2, [(0, 1)]))
    assert entanglement_entropy(psi, [0]) == pytest.approx(1.0)
    rho = reduced_density_matrix(psi, [0])
    assert np.allclose(rho, np.eye(2) / 2)


def test_qubit_order():
    # |1> on qubit 0, |0> on qubit 1 -> amplitude index 1
    s = product_state([np.array([0, 1]), np.array([1, 0])])
    assert s.amplitudes[1] == 1
    x0 = apply_1q(product_state([np.array([1, 0])] * 3), 2, PAULI["X"])
    assert x0.amplitudes[4] == 1


@pytest.mark.parametrize("kind,dims", [("grid", (3, 4)), ("hexagonal", (3, 4)), ("triangular", (3, 3)), ("kagome", (3, 2)), ("star", (9,))])
def test_stabilizers(kind, dims):
    assert stabilizer_deviation(lattice(kind, dims)) < 1e-12


def test_stabilizer_check_detects_wrong_state():
    g = lattice("path", (3,))
    assert stabilizer_deviation(g, graph_state(lattice("cycle", (3,)))) > 0.1


def test_entropy_is_cut_rank(rng):
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 8))
        sub = rng.sample(range(g.n), rng.randint(1, g.n - 1))
        assert abs(entanglement_entropy(graph_state(g), sub) - cut_rank(g, sub)) < 1e-9


def test_measure_probabilities_sum_to_one(rng):
    g = random_graph(rng, 5)
    psi = graph_state(g)
    for basis in "XYZ":
        out = measure(psi, 2, pauli_projectors(basis))
        assert sum(p for p, _ in out) == pytest.approx(1.0)


def test_measure_rejects_incomplete_operators():
    psi = graph_state(lattice("path", (2,)))
    with pytest.raises(InputError):
        measure(psi, 0, [np.diag([1, 0])])
    with pytest.raises(InputError):
        measure(psi, 5, pauli_projectors("Z"))


def test_entropy_rejects_trivial_cuts():
    psi = graph_state(lattice("path", (3,)))
    with pytest.raises(InputError):
        entanglement_entropy(psi, [])
    with pytest.raises(InputError):
        entanglement_entropy(psi, [0, 1, 2])


def test_cap():
    with pytest.raises(ResourceError) as info:
        graph_state(lattice("grid", (3, 5)), cap=14)
    assert "14" in str(info.value)


def test_deformed_state():
    g = lattice("path", (3,))
    assert fidelity(deformed_state(g, 1.0), graph_state(g)) == pytest.approx(1.0)
    s = deformed_state(g, 0.5)
    assert s.norm == pytest.approx(1.0)
    with pytest.raises(InputError):
        deformed_state(g, 0.0)
