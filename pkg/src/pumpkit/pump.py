"""Total money pump (TMP) and its constrained variant as assignment problems.

An arbitrageur following permutation ``sigma`` sells ``x^t`` and buys
``x^{sigma(t)}`` in period ``t``, collecting ``sum_t p^t . (x^t - x^{sigma(t)})``.
TMP is the best such haul; the constrained variant only allows trades that do
not lose money in any single period.
"""

from __future__ import annotations

import itertools
import math
import statistics
import warnings
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np
from numpy.typing import NDArray

from . import _tol
from .dataset import Dataset
from .errors import TooLarge, TruncationWarning
from .graph import Cycle, CycleEnumeration

BRUTE_FORCE_MAX_T = 10


@dataclass(frozen=True)
class PumpResult:
    value: float
    permutation: tuple[int, ...]
    constrained: bool

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles of the permutation, each starting at its smallest node."""
        return permutation_cycles(self.permutation)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "permutation": [s + 1 for s in self.permutation],
            "constrained": self.constrained,
        }


def permutation_cycles(sigma: Sequence[int]) -> list[tuple[int, ...]]:
    seen: set[int] = set()
    out = []
    for start in range(len(sigma)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        v = sigma[start]
        while v != start:
            cyc.append(v)
            seen.add(v)
            v = sigma[v]
        if len(cyc) > 1:
            out.append(tuple(cyc))
    return out


def gain_matrix(d: Dataset) -> NDArray[np.float64]:
    """``gain[t, s] = p^t . x^t - p^t . x^s``: money made in period ``t`` by swapping in ``x^s``."""
    e = d.expenditure.values
    return np.diag(e)[:, None] - e


def allowed_matrix(d: Dataset, budgets: NDArray[np.float64] | None = None, tol: float | None = None):
    """Edges ``t -> s`` with ``p^t . x^s <= m^t`` (``m^t`` defaults to ``p^t . x^t``)."""
    tol = _tol.resolve(tol)
    e = d.expenditure.values
    m = np.diag(e) if budgets is None else np.asarray(budgets, float)
    allowed = e <= m[:, None] + tol
    np.fill_diagonal(allowed, True)
    return allowed


def pump_value(d: Dataset, sigma: Sequence[int]) -> float:
    gain = gain_matrix(d)
    return float(sum(gain[t, s] for t, s in enumerate(sigma)))


def solve_assignment(cost: NDArray[np.float64], allowed: NDArray[np.bool_] | None = None) -> tuple[int, ...]:
    """Minimum-cost perfect assignment by shortest augmenting paths with row/column potentials.

    Forbidden pairs never enter the search. A perfect assignment must exist among
    the allowed pairs. Returns ``sigma`` with row ``t`` assigned to column ``sigma[t]``.
    """
    n = cost.shape[0]
    if allowed is None:
        allowed = np.ones((n, n), dtype=bool)
    inf = math.inf
    # 1-based bookkeeping; column 0 is the virtual start of each augmenting path
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    match = np.zeros(n + 1, dtype=int)  # match[j] = row assigned to column j
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(n + 1, inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            free = ~used[1:]
            cur = np.where(allowed[i0 - 1], cost[i0 - 1] - u[i0] - v[1:], inf)
            improve = free & (cur < minv[1:])
            minv[1:][improve] = cur[improve]
            way[1:][improve] = j0
            candidates = np.where(free, minv[1:], inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]
            if delta == inf:
                raise ValueError("no perfect assignment exists among the allowed pairs")
            u[match[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while True:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
            if j0 == 0:
                break
    sigma = [0] * n
    for j in range(1, n + 1):
        sigma[match[j] - 1] = j - 1
    return tuple(sigma)


def _max_pump(d: Dataset, allowed: NDArray[np.bool_] | None, constrained: bool) -> PumpResult:
    gain = gain_matrix(d)
    sigma = solve_assignment(-gain, allowed)
    value = float(sum(gain[t, s] for t, s in enumerate(sigma)))
    if value <= 0.0:
        # identity is always feasible and worth exactly zero
        sigma, value = tuple(range(d.T)), 0.0
    return PumpResult(value, sigma, constrained)


def tmp(d: Dataset) -> PumpResult:
    """Total money pump: maximum of the pump over all permutations."""
    return _max_pump(d, None, False)


def tmp_constrained(d: Dataset, tol: float | None = None) -> PumpResult:
    """Constrained total money pump: only permutations with ``p^t . x^{sigma(t)} <= p^t . x^t``."""
    return _max_pump(d, allowed_matrix(d, tol=tol), True)


def tmp_with_budgets(d: Dataset, budgets: Sequence[float], tol: float | None = None) -> PumpResult:
    """Best pump over permutations with ``p^t . x^{sigma(t)} <= m^t``."""
    return _max_pump(d, allowed_matrix(d, np.asarray(budgets, float), tol), True)


def tmp_bruteforce(d: Dataset, constrained: bool = False, tol: float | None = None) -> PumpResult:
    """Exhaustive search over all ``T!`` permutations; refuses ``T > 10``."""
    T = d.T
    if T > BRUTE_FORCE_MAX_T:
        raise TooLarge(f"brute force is limited to T <= {BRUTE_FORCE_MAX_T}, got T = {T}")
    gain = gain_matrix(d)
    allowed = allowed_matrix(d, tol=tol) if constrained else None
    rows = np.arange(T)
    best_value, best_sigma = -math.inf, tuple(range(T))
    perms = itertools.permutations(range(T))
    while True:
        chunk = np.array(list(itertools.islice(perms, 50_000)), dtype=np.int64)
        if chunk.size == 0:
            break
        chunk = chunk.reshape(-1, T)
        values = gain[rows, chunk].sum(axis=1)
        if allowed is not None:
            feasible = allowed[rows, chunk].all(axis=1)
            values = np.where(feasible, values, -math.inf)
        k = int(np.argmax(values))
        if values[k] > best_value:
            best_value, best_sigma = float(values[k]), tuple(int(s) for s in chunk[k])
    if best_value <= 0.0:
        best_value, best_sigma = 0.0, tuple(range(T))
    return PumpResult(best_value, best_sigma, constrained)


# ---------------------------------------------------------------------------
# per-violation indices computed from an enumeration of GARP-violating cycles


def _values(cycles: Iterable[Cycle]) -> list[float]:
    if isinstance(cycles, CycleEnumeration) and cycles.truncated:
        warnings.warn(
            f"cycle enumeration stopped at its cap of {cycles.cap}; value covers a subset of violations",
            TruncationWarning,
            stacklevel=3,
        )
    return [c.mp_value for c in cycles]


def scsd_max(cycles: Iterable[Cycle]) -> float:
    """Largest single-violation pump; 0 when there are no violations."""
    values = _values(cycles)
    return max(values) if values else 0.0


def els_average(cycles: Iterable[Cycle], mode: Literal["mean", "median"] = "mean") -> float:
    """Mean or median pump over all violations; 0 when there are none."""
    values = _values(cycles)
    if not values:
        return 0.0
    if mode == "mean":
        return statistics.fmean(values)
    if mode == "median":
        return float(statistics.median(values))
    raise ValueError(f"mode must be 'mean' or 'median', got {mode!r}")
