import itertools
import math
import random

import numpy as np
import pytest

from mbqc_resources.errors import InputError, ResourceError
from mbqc_resources.graph import lattice, make_graph
from mbqc_resources.localizable import concurrence_pure, n_le, pauli_le_pair, strategy_value, unit_le_relation

from conftest import random_connected


def test_concurrence_values():
    r = 1 / math.sqrt(2)
    assert concurrence_pure(r, 0, 0, r) == pytest.approx(1.0)
    assert concurrence_pure(1, 0, 0, 0) == 0.0
    w = 1 / math.sqrt(3)
    assert concurrence_pure(np.array([w, w, w, 0])) == pytest.approx(2 / 3)
    with pytest.raises(InputError):
        concurrence_pure(1, 1, 0, 0)


def test_adjacent_pairs_are_unit(rng):
    for _ in range(15):
        g = random_connected(rng, rng.randint(2, 6))
        for a, b in g.edges():
            res = pauli_le_pair(g, a, b)
            assert res.value == 1.0 and res.witness is not None
            assert strategy_value(g, a, b, res.witness) == pytest.approx(1.0, abs=1e-9)


def test_path_ends():
    res = pauli_le_pair(lattice("path", (3,)), 0, 2)
    assert res.witness == {1: "X"}
    # Z on the middle disconnects the ends
    assert strategy_value(lattice("path", (3,)), 0, 2, {1: "Z"}) == pytest.approx(0.0)


def test_disconnected_pair_is_zero():
    g = make_graph(4, [(0, 1), (2, 3)])
    res = pauli_le_pair(g, 0, 2)
    assert res.value == pytest.approx(0.0) and res.witness is None
    assert res.strategies == 9


def test_best_value_matches_replayed_strategies():
    g = make_graph(4, [(0, 1), (2, 3)])
    vals = [strategy_value(g, 0, 2, dict(zip((1, 3), s))) for s in itertools.product("XYZ", repeat=2)]
    assert pauli_le_pair(g, 0, 2).value == pytest.approx(max(vals))


@pytest.mark.parametrize(
    "g,size",
    [
        (lattice("grid", (2, 2)), 4),
        (lattice("path", (3,)), 3),
        (lattice("star", (5,)), 5),
        (make_graph(4, []), 1),
    ],
)
def test_n_le(g, size):
    assert n_le(g).size == size


def test_relation_symmetric_listing():
    rel = unit_le_relation(lattice("path", (4,)))
    assert all(a < b for a, b in rel)
    assert (0, 1) in rel


def test_errors():
    g = lattice("path", (3,))
    with pytest.raises(InputError):
        pauli_le_pair(g, 0, 0)
    with pytest.raises(InputError):
        pauli_le_pair(g, 0, 7)
    with pytest.raises(ResourceError):
        pauli_le_pair(lattice("path", (11,)), 0, 1)
    with pytest.raises(InputError):
        strategy_value(g, 0, 2, {})
