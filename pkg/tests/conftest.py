import itertools
import random

import pytest

from mbqc_resources.graph import Graph, make_graph


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> Graph:
    edges = [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < p]
    return make_graph(n, edges)


def random_connected(rng: random.Random, n: int, p: float = 0.4) -> Graph:
    # random spanning tree plus extra edges keeps it connected
    edges = {(rng.randrange(v), v) for v in range(1, n)}
    edges |= {(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < p}
    return make_graph(n, sorted(edges))


def random_tree(rng: random.Random, n: int) -> Graph:
    return make_graph(n, [(rng.randrange(v), v) for v in range(1, n)])


def all_graphs(n: int):
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        yield make_graph(n, [e for i, e in enumerate(pairs) if bits >> i & 1])


@pytest.fixture
def rng():
    return random.Random(20261015)
