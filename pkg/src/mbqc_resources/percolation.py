"""Filtering of deformed cluster states and the resulting site percolation.

Each qubit of ``diag(1, lam)^{(x)m} |G>`` is measured with the two-outcome
filter ``{diag(lam, 1), diag(sqrt(1 - lam^2), 0)}``. The first outcome
restores the undeformed graph state locally; the second leaves a defect. The
Monte Carlo side samples i.i.d. defects on a ``k x k`` lattice and records
whether the intact sites still connect the left and right edges.

Every trial draws its own ``k x k`` field of uniforms from a dedicated child
stream of ``SeedSequence(seed)``. A site is intact when its uniform is at
least ``p_def``, so one field serves every lambda in a sweep (paired seeds)
and crossing frequency is monotone in lambda by construction.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .errors import InputError
from .graph import Graph
from .oracle import DEFAULT_QUBIT_CAP, deformed_state, measure

__all__ = [
    "SITE_THRESHOLD_SQUARE",
    "FilterModel",
    "PercResult",
    "defect_probability",
    "filter_operators",
    "filter_distribution_exact",
    "marginal_defect_probabilities",
    "independence_deviation",
    "trial_fields",
    "crossing_stats",
    "percolation_scan",
    "crossing_frequency",
    "estimate_occupation_threshold",
    "scan_to_csv",
    "parse_lambda_grid",
]

# Literature value for square-lattice site percolation; a calibration
# constant for the Monte Carlo engine only.
SITE_THRESHOLD_SQUARE = 0.592746

CSV_COLUMNS = ("k", "lambda", "p_def", "trials", "crossing_freq", "largest_frac", "seed")

_CROSS = ndimage.generate_binary_structure(2, 1)
_STACK = np.zeros((3, 3, 3), dtype=bool)
_STACK[1] = _CROSS


def _check_lambda(lam: float) -> None:
    if not (isinstance(lam, (int, float)) and 0 < lam <= 1):
        raise InputError(f"lambda must lie in (0, 1], got {lam!r}")


def defect_probability(lam: float) -> float:
    """(1 - lam^2) / (1 + lam^2)."""
    _check_lambda(lam)
    return (1 - lam * lam) / (1 + lam * lam)


@dataclass(frozen=True)
class FilterModel:
    lam: float

    def __post_init__(self) -> None:
        _check_lambda(self.lam)

    @property
    def p_def(self) -> float:
        return defect_probability(self.lam)

    @property
    def deformation(self) -> np.ndarray:
        return np.diag([1.0, self.lam])


def filter_operators(lam: float) -> list[np.ndarray]:
    """Kraus operators ``[success, defect]`` of the local filter."""
    _check_lambda(lam)
    return [np.diag([lam, 1.0]), np.diag([math.sqrt(1 - lam * lam), 0.0])]


def filter_distribution_exact(g: Graph, lam: float, cap: int = DEFAULT_QUBIT_CAP) -> dict[str, float]:
    """Joint distribution of filter outcomes over all qubits.

    Keys are strings whose ``q``-th character is ``'0'`` (success) or
    ``'1'`` (defect) for qubit ``q``; zero-probability outcomes are omitted.
    """
    state = deformed_state(g, lam, cap=cap)
    ops = filter_operators(lam)
    out: dict[str, float] = {}

    def branch(st, q: int, prefix: str, prob: float) -> None:
        if q == g.n:
            out[prefix] = prob
            return
        for o, (p, post) in enumerate(measure(st, q, ops)):
            if post is not None:
                branch(post, q + 1, prefix + str(o), prob * p)

    branch(state, 0, "", 1.0)
    return dict(sorted(out.items()))


def marginal_defect_probabilities(dist: dict[str, float]) -> list[float]:
    n = len(next(iter(dist)))
    return [sum(p for key, p in dist.items() if key[q] == "1") for q in range(n)]


def independence_deviation(dist: dict[str, float]) -> float:
    """Largest gap between a joint probability and the product of its marginals."""
    marg = marginal_defect_probabilities(dist)
    n = len(marg)
    worst = 0.0
    for bits in range(1 << n):
        key = "".join("1" if (bits >> q) & 1 else "0" for q in range(n))
        prod = math.prod(marg[q] if key[q] == "1" else 1 - marg[q] for q in range(n))
        worst = max(worst, abs(dist.get(key, 0.0) - prod))
    return worst


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class PercResult:
    k: int
    lam: float
    p_def: float
    trials: int
    crossing_freq: float
    largest_frac: float
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def trial_fields(k: int, trials: int, seed: int, start: int = 0) -> np.ndarray:
    """Uniform fields for trials ``start .. start+trials-1``, shape (trials, k, k)."""
    children = np.random.SeedSequence(seed).spawn(start + trials)[start:]
    return np.stack([np.random.Generator(np.random.PCG64(c)).random((k, k)) for c in children])


def crossing_stats(intact: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial left-right crossing flags and largest-cluster fractions.

    ``intact`` has shape (trials, k, k); clusters use 4-neighbour
    connectivity within each trial.
    """
    t, k, _ = intact.shape
    labels, count = ndimage.label(intact, structure=_STACK)
    left = np.zeros(count + 1, dtype=bool)
    right = np.zeros(count + 1, dtype=bool)
    left[labels[:, :, 0].ravel()] = True
    right[labels[:, :, -1].ravel()] = True
    spans = left & right
    spans[0] = False
    crossing = spans[labels[:, :, 0]].any(axis=1)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    sizes[0] = 0
    largest = np.zeros(t)
    if count:
        # label ids grow with the trial index, so per-trial maxima are contiguous runs
        first = labels.reshape(t, -1).max(axis=1)
        lo = 1
        for i in range(t):
            hi = first[i]
            if hi >= lo:
                largest[i] = sizes[lo : hi + 1].max()
                lo = hi + 1
    return crossing, largest / (k * k)


def _chunks(trials: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(size, trials - s)) for s in range(0, trials, size)]


def percolation_scan(
    k_list: Sequence[int],
    lam_grid: Sequence[float],
    trials: int,
    seed: int,
    threads: int = 1,
    chunk: int = 100,
) -> list[PercResult]:
    """Crossing frequency and mean largest-cluster fraction for every (k, lambda)."""
    if trials < 1:
        raise InputError("trials must be at least 1")
    for k in k_list:
        if k < 1:
            raise InputError("lattice size must be positive")
    lams = list(lam_grid)
    for lam in lams:
        _check_lambda(lam)
    results = []
    for k in k_list:
        pdefs = [defect_probability(lam) for lam in lams]

        def work(span: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
            fields = trial_fields(k, span[1], seed, span[0])
            cross = np.zeros(len(pdefs))
            big = np.zeros(len(pdefs))
            for i, p in enumerate(pdefs):
                c, f = crossing_stats(fields >= p)
                cross[i] = c.sum()
                # integer site counts keep the total independent of chunking
                big[i] = np.rint(f * k * k).sum()
            return cross, big

        spans = _chunks(trials, chunk)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                parts = list(ex.map(work, spans))
        else:
            parts = [work(s) for s in spans]
        cross = sum(p[0] for p in parts)
        big = sum(p[1] for p in parts)
        for i, lam in enumerate(lams):
            results.append(
                PercResult(k, lam, pdefs[i], trials, float(cross[i] / trials), float(big[i] / (trials * k * k)), seed)
            )
    return results


def crossing_frequency(k: int, occupation: float, trials: int, seed: int) -> float:
    """Fraction of trials whose occupied sites (probability ``occupation``) cross."""
    if not 0 <= occupation <= 1:
        raise InputError("occupation must lie in [0, 1]")
    fields = trial_fields(k, trials, seed)
    return float(crossing_stats(fields < occupation)[0].mean())


def estimate_occupation_threshold(
    k: int, trials: int, seed: int, tol: float = 1e-4, min_k: int = 16
) -> float:
    """Occupation probability at which half the trials cross, by bisection.

    All bisection steps reuse the same fields, so the crossing frequency is
    a nondecreasing step function of the occupation.
    """
    if k < min_k:
        raise InputError(f"threshold estimation needs k >= {min_k}")
    if trials < 1:
        raise InputError("trials must be at least 1")
    fields = trial_fields(k, trials, seed)

    def freq(p: float) -> float:
        return float(crossing_stats(fields < p)[0].mean())

    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if freq(mid) >= 0.5:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def scan_to_csv(results: Iterable[PercResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow([r.k, f"{r.lam:.6g}", f"{r.p_def:.10f}", r.trials, f"{r.crossing_freq:.6f}", f"{r.largest_frac:.6f}", r.seed])
    return buf.getvalue()


def parse_lambda_grid(text: str) -> list[float]:
    """``"0.9:1.0:0.01"`` (inclusive range) or ``"0.5,0.9,0.98"``."""
    try:
        if ":" in text:
            lo, hi, step = (float(x) for x in text.split(":"))
            if step <= 0 or hi < lo:
                raise InputError(f"bad lambda range {text!r}")
            n = int(math.floor((hi - lo) / step + 1e-9)) + 1
            return [round(lo + i * step, 12) for i in range(n)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad lambda grid {text!r}") from exc
