import csv
import io

import networkx as nx
import numpy as np
import pytest

from mbqc_resources.errors import InputError
from mbqc_resources.graph import lattice
from mbqc_resources.percolation import (
    CSV_COLUMNS,
    FilterModel,
    crossing_frequency,
    crossing_stats,
    defect_probability,
    estimate_occupation_threshold,
    filter_distribution_exact,
    filter_operators,
    independence_deviation,
    marginal_defect_probabilities,
    parse_lambda_grid,
    percolation_scan,
    scan_to_csv,
    trial_fields,
)


def test_defect_probability():
    assert defect_probability(1.0) == 0.0
    assert defect_probability(0.98) == pytest.approx(0.0201999592, abs=1e-9)
    assert FilterModel(0.5).p_def == pytest.approx(0.6)
    with pytest.raises(InputError):
        defect_probability(0.0)
    with pytest.raises(InputError):
        FilterModel(1.5)


def test_filter_is_complete():
    k = filter_operators(0.7)
    assert np.allclose(sum(m.conj().T @ m for m in k), np.eye(2))


@pytest.mark.parametrize("lam", [0.3, 0.9])
def test_exact_distribution(lam):
    dist = filter_distribution_exact(lattice("grid", (2, 2)), lam)
    assert sum(dist.values()) == pytest.approx(1.0)
    for p in marginal_defect_probabilities(dist):
        assert p == pytest.approx(defect_probability(lam), abs=1e-12)
    assert independence_deviation(dist) < 1e-12


def naive_cross(field):
    k = field.shape[0]
    g = nx.grid_2d_graph(k, k)
    g.remove_nodes_from([(r, c) for r in range(k) for c in range(k) if not field[r, c]])
    comps = list(nx.connected_components(g))
    cross = any(any(c == 0 for _, c in comp) and any(c == k - 1 for _, c in comp) for comp in comps)
    largest = max((len(c) for c in comps), default=0) / (k * k)
    return cross, largest


def test_crossing_stats_against_networkx():
    rng = np.random.default_rng(3)
    intact = rng.random((40, 7, 7)) < 0.6
    cross, big = crossing_stats(intact)
    for t in range(40):
        c, b = naive_cross(intact[t])
        assert bool(cross[t]) == c
        assert big[t] == pytest.approx(b)


def test_fields_are_chunk_independent():
    whole = trial_fields(8, 10, seed=5)
    parts = np.concatenate([trial_fields(8, 4, seed=5, start=0), trial_fields(8, 6, seed=5, start=4)])
    assert np.array_equal(whole, parts)


def test_scan_is_thread_and_chunk_independent():
    a = percolation_scan([12], [0.6, 0.9], trials=37, seed=9, threads=1, chunk=100)
    b = percolation_scan([12], [0.6, 0.9], trials=37, seed=9, threads=3, chunk=5)
    assert a == b


def test_scan_monotone_in_lambda():
    res = percolation_scan([24], parse_lambda_grid("0.5:1.0:0.05"), trials=100, seed=1)
    freqs = [r.crossing_freq for r in res]
    assert freqs == sorted(freqs)
    assert freqs[0] == 0.0 and freqs[-1] == 1.0


def test_csv():
    text = scan_to_csv(percolation_scan([8], [0.9], trials=5, seed=2))
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[1][0] == "8" and rows[1][-1] == "2"


def test_lambda_grid():
    assert parse_lambda_grid("0.9:1.0:0.05") == [0.9, 0.95, 1.0]
    assert parse_lambda_grid("0.5,0.98") == [0.5, 0.98]
    for bad in ("a,b", "1:0:0.1", "0:1:0"):
        with pytest.raises(InputError):
            parse_lambda_grid(bad)


def test_threshold_bracket():
    assert crossing_frequency(32, 0.45, 50, seed=4) < 0.1
    assert crossing_frequency(32, 0.75, 50, seed=4) > 0.9
    est = estimate_occupation_threshold(32, 200, seed=4, tol=1e-3)
    assert 0.55 < est < 0.64
    with pytest.raises(InputError):
        estimate_occupation_threshold(8, 10, seed=4)
