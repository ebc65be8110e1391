import itertools
import math
import random

import pytest

from mbqc_resources.errors import InputError, ResourceError
from mbqc_resources.graph import lattice, make_graph
from mbqc_resources.gf2 import BitMatrix
from mbqc_resources.width import (
    SubcubicTree,
    cut_rank,
    cut_rank_function,
    enumerate_subcubic_trees,
    exact_width,
    grid_lower_bound,
    rank_width,
    splits_to_tree,
    tree_count,
    tree_width_value,
    treewidth_upper_bound,
)

from conftest import random_connected, random_graph


def brute_width(w, m):
    # independent oracle: score every tree produced by the edge-subdivision enumerator
    return min(tree_width_value(w, t) for t in enumerate_subcubic_trees(m))


def test_cut_rank_is_block_rank(rng):
    for _ in range(50):
        g = random_graph(rng, rng.randint(2, 9))
        a = rng.sample(range(g.n), rng.randint(1, g.n - 1))
        b = [v for v in range(g.n) if v not in a]
        block = BitMatrix.from_rows([[int(g.has_edge(u, v)) for v in b] for u in a])
        assert cut_rank(g, a) == block.rank()
        assert cut_rank(g, a) == cut_rank(g, b)


@pytest.mark.parametrize("m,count", [(2, 1), (3, 1), (4, 3), (5, 15), (6, 105), (7, 945), (8, 10395)])
def test_tree_count(m, count):
    assert tree_count(m) == count
    if m <= 7:
        trees = list(enumerate_subcubic_trees(m))
        assert len(trees) == count
        assert len({t.canonical() for t in trees}) == count


def test_tree_validation():
    with pytest.raises(InputError):
        SubcubicTree(3, ((0, 1),), {0: 0, 2: 1})
    with pytest.raises(InputError):
        SubcubicTree(5, ((0, 1), (0, 2), (0, 3), (0, 4)), {1: 0, 2: 1, 3: 2, 4: 3})


def test_tree_roundtrip():
    t = splits_to_tree(5, [0b00110, 0b11000])
    assert SubcubicTree.from_dict(t.to_dict()) == t
    assert set(t.canonical()) >= {0b00110, 0b11000}
    assert "graph" in t.to_dot()


@pytest.mark.parametrize(
    "g,value",
    [
        (lattice("path", (5,)), 1),
        (lattice("star", (6,)), 1),
        (lattice("cycle", (4,)), 1),
        (lattice("cycle", (6,)), 2),
        (make_graph(5, list(itertools.combinations(range(5), 2))), 1),
        (lattice("grid", (3, 3)), 2),
    ],
)
def test_known_rank_widths(g, value):
    assert rank_width(g).value == value
    if g.n <= 9:
        assert rank_width(g, method="enumerate").value == value


def test_grid_4x4():
    assert rank_width(lattice("grid", (4, 4))).value == 3


def test_solvers_agree_with_brute_force(rng):
    for _ in range(40):
        g = random_graph(rng, rng.randint(3, 7))
        w = cut_rank_function(g)
        ref = brute_width(w, g.n)
        for method in ("subset_dp", "enumerate"):
            res = exact_width(w, g.n, method=method)
            assert res.value == ref
            assert tree_width_value(w, res.witness) == ref


def test_enumerate_witness_is_smallest_optimal(rng):
    g = random_connected(rng, 6)
    w = cut_rank_function(g)
    res = exact_width(w, 6, method="enumerate")
    best = min(t.canonical() for t in enumerate_subcubic_trees(6) if tree_width_value(w, t) == res.value)
    assert res.witness.canonical() == best


def test_non_integer_width_function():
    # weights on qubit subsets that are not cut-ranks
    def w(mask):
        return abs(math.sin(mask * 0.7)) if mask not in (0, 15) else 0.0

    sym = lambda s: max(w(s), w(15 ^ s))
    assert exact_width(sym, 4).value == pytest.approx(brute_width(sym, 4))


def test_tiny_and_caps():
    assert exact_width(lambda s: 5, 1).value == 0
    assert rank_width(make_graph(2, [(0, 1)])).value == 1
    with pytest.raises(ResourceError):
        rank_width(lattice("grid", (3, 4)), method="enumerate")
    with pytest.raises(ResourceError):
        rank_width(lattice("grid", (3, 6)))
    with pytest.raises(InputError):
        exact_width(lambda s: 0, 4, method="magic")


def test_bounds():
    assert grid_lower_bound(3) == pytest.approx(math.log2(5) - 1)
    assert grid_lower_bound(6) == pytest.approx(2.0)
    assert treewidth_upper_bound(1) == 5
    assert treewidth_upper_bound(3) == 17
    with pytest.raises(InputError):
        grid_lower_bound(2)
    with pytest.raises(InputError):
        treewidth_upper_bound(0)
