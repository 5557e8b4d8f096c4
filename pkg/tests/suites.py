"""Seeded dataset suites and independent reference implementations shared by the tests."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from pumpkit.dataset import Dataset, load_fixture
from pumpkit.generators import generate_cobb_douglas_dataset, generate_quasilinear_dataset, random_dataset

RANDOM_SEED = 20240
RANDOM_COUNT = 300
GENERATED_COUNT = 100
FIXTURE_NAMES = ("fig1a", "fig1b", "example1", "example1_perturbed", "example2")


@lru_cache(maxsize=None)
def random_suite() -> tuple[Dataset, ...]:
    """300 datasets with T <= 8, L <= 4 and entries uniform on [0.1, 10]."""
    rng = np.random.default_rng(RANDOM_SEED)
    out = []
    for _ in range(RANDOM_COUNT):
        T = int(rng.integers(1, 9))
        L = int(rng.integers(1, 5))
        out.append(random_dataset(rng, T, L, 0.1, 10.0))
    return tuple(out)


@lru_cache(maxsize=None)
def quasilinear_suite() -> tuple[Dataset, ...]:
    rng = np.random.default_rng(RANDOM_SEED + 1)
    return tuple(
        generate_quasilinear_dataset(1000 + i, int(rng.integers(1, 9)), int(rng.integers(1, 5)))
        for i in range(GENERATED_COUNT)
    )


@lru_cache(maxsize=None)
def cobb_douglas_suite() -> tuple[Dataset, ...]:
    rng = np.random.default_rng(RANDOM_SEED + 2)
    return tuple(
        generate_cobb_douglas_dataset(2000 + i, int(rng.integers(1, 9)), int(rng.integers(1, 5)))
        for i in range(GENERATED_COUNT)
    )


@lru_cache(maxsize=None)
def fixtures() -> tuple[Dataset, ...]:
    return tuple(load_fixture(n) for n in FIXTURE_NAMES)


def all_suites() -> tuple[Dataset, ...]:
    return fixtures() + random_suite() + quasilinear_suite() + cobb_douglas_suite()


# ---------------------------------------------------------------------------
# references written without touching the library's algorithms


def naive_expenditure(d: Dataset) -> np.ndarray:
    T = d.T
    out = np.zeros((T, T))
    for t in range(T):
        for s in range(T):
            out[t, s] = sum(float(a) * float(b) for a, b in zip(d.prices[t], d.bundles[s]))
    return out


def cycle_mp(d: Dataset, nodes) -> float:
    """Money pumped around ``nodes`` (0-based, closing edge implicit)."""
    e = naive_expenditure(d)
    total = 0.0
    for k, t in enumerate(nodes):
        nxt = nodes[(k + 1) % len(nodes)]
        total += e[t, t] - e[t, nxt]
    return total


def brute_force_violations(d: Dataset, tol: float = 1e-9) -> dict[tuple[int, ...], float]:
    """Every simple cycle of weak edges with a strict edge, from all ordered subsets."""
    e = naive_expenditure(d)
    own = np.diag(e)
    weak = own[:, None] >= e - tol
    strict = own[:, None] > e + tol
    found = {}
    for k in range(2, d.T + 1):
        for combo in itertools.combinations(range(d.T), k):
            first = combo[0]
            for rest in itertools.permutations(combo[1:]):
                nodes = (first,) + rest
                edges = [(nodes[i], nodes[(i + 1) % k]) for i in range(k)]
                if all(weak[a, b] for a, b in edges) and any(strict[a, b] for a, b in edges):
                    found[nodes] = cycle_mp(d, nodes)
    return found


def naive_pump(d: Dataset, constrained: bool, tol: float = 1e-9) -> float:
    e = naive_expenditure(d)
    own = np.diag(e)
    best = 0.0
    for sigma in itertools.permutations(range(d.T)):
        if constrained and any(e[t, sigma[t]] > own[t] + tol for t in range(d.T)):
            continue
        best = max(best, sum(own[t] - e[t, sigma[t]] for t in range(d.T)))
    return best


def grid_ccei(d: Dataset, step: float = 1e-4, tol: float = 1e-9) -> float:
    """Smallest grid point e at which the budget-shrunk relations carry no strict cycle."""
    e = naive_expenditure(d)
    own = np.diag(e)
    for k in range(int(round(1 / step)) + 1):
        waste = k * step
        shrunk = own[:, None] * (1 - waste)
        weak = shrunk >= e - tol
        strict = shrunk > e + tol
        np.fill_diagonal(weak, True)
        np.fill_diagonal(strict, False)
        reach = weak.copy()
        for m in range(d.T):
            reach |= reach[:, [m]] & reach[[m], :]
        if not np.any(reach & strict.T):
            return waste
    return 1.0


# filled by the acceptance tests, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}
