import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from mbqc_resources.calculus import (
    MeasurementPattern,
    apply_pattern,
    delete_vertex,
    local_complement,
    measure_pauli,
)
from mbqc_resources.errors import InputError
from mbqc_resources.graph import lattice, make_graph
from mbqc_resources.oracle import verify_pattern, verify_rule

from conftest import random_connected, random_graph


@st.composite
def graph_and_vertex(draw):
    n = draw(st.integers(1, 9))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    g = make_graph(n, [e for e, b in zip(pairs, mask) if b])
    return g, draw(st.integers(0, n - 1))


@settings(max_examples=300, deadline=None)
@given(graph_and_vertex())
def test_local_complement_is_involution(ga):
    g, a = ga
    assert local_complement(local_complement(g, a), a).same_edges(g)


@settings(max_examples=300, deadline=None)
@given(graph_and_vertex())
def test_local_complement_definition(ga):
    g, a = ga
    h = local_complement(g, a)
    nb = set(g.neighbors(a))
    for u, v in itertools.combinations(range(g.n), 2):
        flip = u in nb and v in nb
        assert h.has_edge(u, v) == (g.has_edge(u, v) != flip)


def test_examples():
    star = lattice("star", (5,))
    assert local_complement(star, 0).num_edges == 4 + 6
    h, _ = measure_pauli(star, 0, "Z")
    assert h.n == 4 and h.num_edges == 0
    h, rec = measure_pauli(lattice("path", (3,)), 1, "Y", 1)
    assert h.edges() == [(0, 1)]
    assert rec.tags == {0: ["sqrt(-iZ)"], 1: ["sqrt(-iZ)"]}
    h, rec = measure_pauli(lattice("path", (3,)), 1, "Z", -1)
    assert h.num_edges == 0 and rec.tags == {0: ["Z"], 1: ["Z"]}


def test_delete_vertex_mapping():
    g = lattice("path", (4,))
    h, mp = delete_vertex(g, 1)
    assert mp == {0: 0, 2: 1, 3: 2}
    assert h.edges() == [(1, 2)]


@pytest.mark.parametrize("basis", ["Y", "Z"])
@pytest.mark.parametrize("outcome", [1, -1])
def test_rules_match_simulation(basis, outcome):
    rng = random.Random(7)
    for _ in range(25):
        g = random_connected(rng, rng.randint(2, 7))
        for a in range(g.n):
            rep = verify_rule(g, a, basis, outcome)
            assert rep.passed, (g.edges(), a, rep)
            assert abs(rep.probability - 0.5) < 1e-12


def test_isolated_vertex():
    # |+> gives both Y and Z outcomes with probability 1/2 and no tags
    g = make_graph(2, [])
    for basis, outcome in itertools.product("YZ", (1, -1)):
        rep = verify_rule(g, 0, basis, outcome)
        assert rep.passed and rep.probability == pytest.approx(0.5)


def test_patterns_match_simulation():
    rng = random.Random(11)
    for _ in range(40):
        g = random_graph(rng, rng.randint(3, 7), 0.5)
        verts = rng.sample(range(g.n), rng.randint(1, g.n - 1))
        pat = MeasurementPattern.of((v, rng.choice("YZ"), rng.choice((1, -1))) for v in verts)
        rep = verify_pattern(g, pat)
        assert rep.passed, (g.edges(), pat)


def test_frame_is_logged():
    # Y on 1 tags 0 and 2; measuring 2 afterwards happens in that frame
    g = lattice("path", (4,))
    _, rec, where = apply_pattern(g, MeasurementPattern.of([(1, "Y"), (2, "Z")]))
    assert rec.measured[1].frame == ("sqrt(-iZ)",)
    assert where == {0: 0, 3: 1}


@pytest.mark.parametrize(
    "steps",
    [[(0, "Y"), (0, "Z")], [(9, "Y")], [(0, "X")], [(0, "Y", 2)]],
)
def test_invalid_patterns(steps):
    with pytest.raises(InputError):
        apply_pattern(lattice("path", (3,)), MeasurementPattern.of(steps))


def test_pattern_json_roundtrip():
    p = MeasurementPattern.of([(0, "Y"), (3, "Z", -1)])
    assert MeasurementPattern.from_json(p.to_json()) == p
    with pytest.raises(InputError):
        MeasurementPattern.from_json('{"steps": []}')
