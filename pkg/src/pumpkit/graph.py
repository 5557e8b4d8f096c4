"""Revealed-preference relations, GARP and cyclical-monotonicity checks, cycle enumeration.

Edge ``t -> s`` carries weight ``p^t . (x^s - x^t)``; a money pump is a directed
cycle of negative total weight, and a GARP violation is a cycle of weak
revealed-preference edges containing at least one strict one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

import networkx as nx
import numpy as np
from numpy.typing import NDArray

from . import _tol
from .dataset import Dataset, ExpenditureMatrix

DEFAULT_CYCLE_CAP = 100_000


@dataclass(frozen=True, eq=False)
class RevealedPreferenceGraph:
    weak: NDArray[np.bool_]
    strict: NDArray[np.bool_]
    weights: NDArray[np.float64]
    tol: float

    @property
    def T(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True, order=True)
class Cycle:
    """A directed cycle ``nodes[0] -> nodes[1] -> ... -> nodes[0]`` (closing edge implicit)."""

    nodes: tuple[int, ...]
    mp_value: float
    has_strict_edge: bool

    def to_dict(self) -> dict:
        return {"nodes": [n + 1 for n in self.nodes], "mp": self.mp_value, "strict": self.has_strict_edge}


@dataclass(frozen=True)
class GarpResult:
    satisfied: bool
    witness: Cycle | None = None


@dataclass(frozen=True)
class CmResult:
    satisfied: bool
    witness: Cycle | None = None


@dataclass(frozen=True)
class CycleEnumeration:
    """GARP-violating cycles in lexicographic order; ``truncated`` is set when the cap was hit."""

    cycles: tuple[Cycle, ...]
    truncated: bool
    cap: int

    def __iter__(self) -> Iterator[Cycle]:
        return iter(self.cycles)

    def __len__(self) -> int:
        return len(self.cycles)

    def __getitem__(self, i: int) -> Cycle:
        return self.cycles[i]


def build_graph(e: ExpenditureMatrix | Dataset, tol: float | None = None) -> RevealedPreferenceGraph:
    if isinstance(e, Dataset):
        e = e.expenditure
    tol = _tol.resolve(tol)
    values = e.values
    own = np.diag(values)[:, None]
    weak = own >= values - tol
    strict = own > values + tol
    np.fill_diagonal(weak, True)
    np.fill_diagonal(strict, False)
    weights = values - own
    for arr in (weak, strict, weights):
        arr.setflags(write=False)
    return RevealedPreferenceGraph(weak, strict, weights, tol)


def canonical_rotation(nodes: Sequence[int]) -> tuple[int, ...]:
    nodes = tuple(int(n) for n in nodes)
    k = nodes.index(min(nodes))
    return nodes[k:] + nodes[:k]


def cycle_weight(weights: NDArray[np.float64], nodes: Sequence[int]) -> float:
    total = 0.0
    for a, b in zip(nodes, tuple(nodes[1:]) + (nodes[0],)):
        total += weights[a, b]
    return float(total)


def make_cycle(g: RevealedPreferenceGraph, nodes: Sequence[int]) -> Cycle:
    nodes = canonical_rotation(nodes)
    edges = list(zip(nodes, nodes[1:] + nodes[:1]))
    return Cycle(
        nodes=nodes,
        mp_value=-cycle_weight(g.weights, nodes),
        has_strict_edge=any(bool(g.strict[a, b]) for a, b in edges),
    )


def transitive_closure(adj: NDArray[np.bool_]) -> NDArray[np.bool_]:
    reach = adj.copy()
    np.fill_diagonal(reach, True)
    for k in range(reach.shape[0]):
        reach |= reach[:, k, None] & reach[None, k, :]
    return reach


def _bfs_path(adj: NDArray[np.bool_], src: int, dst: int) -> list[int]:
    prev = {src: src}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if v == dst:
            break
        for w in np.flatnonzero(adj[v]):
            w = int(w)
            if w not in prev:
                prev[w] = v
                queue.append(w)
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path[::-1]


def garp_cycle(weak: NDArray[np.bool_], strict: NDArray[np.bool_]) -> list[int] | None:
    """Nodes of some weak cycle containing a strict edge, or None when there is none."""
    reach = transitive_closure(weak)
    bad = reach & strict.T
    if not bad.any():
        return None
    t, s = (int(i) for i in np.argwhere(bad)[0])
    # weak path t -> ... -> s closed by the strict edge s -> t
    return _bfs_path(weak, t, s)


def check_garp(g: RevealedPreferenceGraph) -> GarpResult:
    nodes = garp_cycle(g.weak, g.strict)
    if nodes is None:
        return GarpResult(True)
    return GarpResult(False, make_cycle(g, nodes))


# ---------------------------------------------------------------------------
# label-correcting shortest paths from a virtual zero-weight source


def bellman_ford(weights: NDArray[np.float64], max_passes: int | None = None):
    """Distances from a virtual source joined to every node by a zero-weight edge.

    Returns ``(dist, pred, converged)``. When ``converged`` is true the result
    satisfies ``dist[b] <= dist[a] + weights[a, b]`` for every pair, exactly in
    floating point (the final pass made no update).
    """
    n = weights.shape[0]
    dist = np.zeros(n)
    pred = np.full(n, -1, dtype=int)
    passes = n + 1 if max_passes is None else max_passes
    last_updated: list[int] = []
    for _ in range(passes):
        last_updated = []
        for a in range(n):
            cand = dist[a] + weights[a]
            better = cand < dist
            better[a] = False
            if better.any():
                idx = np.flatnonzero(better)
                dist[idx] = cand[idx]
                pred[idx] = a
                last_updated.extend(int(i) for i in idx)
        if not last_updated:
            return dist, pred, True
    return dist, pred, False


def _pred_cycle(pred: NDArray[np.int_], starts: Sequence[int]) -> list[int] | None:
    n = len(pred)
    for start in list(starts) + list(range(n)):
        v = start
        seen: dict[int, int] = {}
        step = 0
        while v != -1 and v not in seen:
            seen[v] = step
            v = int(pred[v])
            step += 1
        if v == -1:
            continue
        cycle = [v]
        u = int(pred[v])
        while u != v:
            cycle.append(u)
            u = int(pred[u])
        # pred points backwards along edges
        return cycle[::-1]
    return None


def find_negative_cycle(weights: NDArray[np.float64], tol: float) -> list[int] | None:
    """A directed cycle whose total weight is below ``-tol`` (up to a tolerance band).

    Every edge is shifted up by ``tol / n`` before the search, so any cycle of
    weight below ``-tol`` stays negative while cycles of weight exactly zero
    (ties perturbed by rounding) become positive.
    """
    n = weights.shape[0]
    if n < 2:
        return None
    shifted = weights + tol / n
    _, pred, converged = bellman_ford(shifted, max_passes=n + 1)
    if converged:
        return None
    nodes = _pred_cycle(pred, [])
    if nodes is None or cycle_weight(shifted, nodes) >= 0.0:  # pragma: no cover - defensive
        raise RuntimeError("label-correcting pass failed to isolate a negative cycle")
    return nodes


def check_cyclical_monotonicity(g: RevealedPreferenceGraph) -> CmResult:
    nodes = find_negative_cycle(np.asarray(g.weights), g.tol)
    if nodes is None:
        return CmResult(True)
    return CmResult(False, make_cycle(g, nodes))


# ---------------------------------------------------------------------------


def enumerate_garp_violations(g: RevealedPreferenceGraph, cap: int = DEFAULT_CYCLE_CAP) -> CycleEnumeration:
    """All simple weak cycles with at least one strict edge, at most ``cap`` of them.

    Rotations are identified; a cycle and its reversal are distinct.
    """
    if cap < 1:
        raise ValueError("cap must be a positive integer")
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(g.T))
    digraph.add_edges_from((int(a), int(b)) for a, b in np.argwhere(g.weak) if a != b)
    found: list[Cycle] = []
    truncated = False
    for nodes in nx.simple_cycles(digraph):
        cyc = make_cycle(g, nodes)
        if not cyc.has_strict_edge:
            continue
        if len(found) == cap:
            truncated = True
            break
        found.append(cyc)
    found.sort(key=lambda c: c.nodes)
    return CycleEnumeration(tuple(found), truncated, cap)
