"""Served-clique selection: exact maximum-weight clique and modified-weight greedy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from o2onc.graph import CodingGraph

EXACT_CAP = 80
TIE_TOLERANCE = 1e-9


class SizeCapExceeded(RuntimeError):
    pass


@dataclass
class WeightedGraph:
    graph: CodingGraph
    weights: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (len(self.graph),):
            raise ValueError("one weight per vertex required")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")

    @property
    def adjacency(self) -> np.ndarray:
        return self.graph.adjacency


def clique_weight(wg: WeightedGraph, members: Sequence[int]) -> float:
    return math.fsum(wg.weights[m] for m in members)


def _better(cand: tuple[float, list[int]], best: tuple[float, list[int]]) -> bool:
    """Order by weight, then size, then lexicographically smaller member list."""
    (cw, cm), (bw, bm) = cand, best
    if cw != bw:
        return cw > bw
    if len(cm) != len(bm):
        return len(cm) > len(bm)
    return sorted(cm) < sorted(bm)


def _degeneracy_order(adj: np.ndarray) -> list[int]:
    deg = adj.sum(axis=1).astype(int)
    alive = np.ones(len(adj), dtype=bool)
    order = []
    for _ in range(len(adj)):
        cand = np.flatnonzero(alive)
        v = int(cand[np.argmin(deg[cand])])
        order.append(v)
        alive[v] = False
        deg[adj[v]] -= 1
    return order


def max_weight_clique_exact(wg: WeightedGraph, cap: int = EXACT_CAP) -> list[int]:
    """Branch and bound over a degeneracy ordering.

    The bound for a candidate set is a greedy colouring of it: each colour
    class is an independent set, so a clique takes at most one vertex per
    class and the sum of per-class maximum weights bounds what is left.
    Returns sorted member indices.
    """
    nv = len(wg.graph)
    if nv > cap:
        raise SizeCapExceeded(f"{nv} vertices exceed the exact-search cap {cap}")
    if nv == 0:
        return []
    adj = wg.adjacency
    w = wg.weights
    nbr = [0] * nv
    for v in range(nv):
        for u in np.flatnonzero(adj[v]):
            nbr[v] |= 1 << int(u)
    # highest-degeneracy vertices first: they sit in the densest cores
    order = _degeneracy_order(adj)[::-1]
    tol = 1e-12 * max(1.0, float(w.sum()))
    best: tuple[float, list[int]] = (0.0, [])

    def bound(cands: list[int]) -> float:
        classes: list[tuple[int, float]] = []
        total = 0.0
        for v in cands:
            for i, (members, top) in enumerate(classes):
                if not members & nbr[v]:
                    classes[i] = (members | 1 << v, max(top, w[v]))
                    break
            else:
                classes.append((1 << v, w[v]))
        for _, top in classes:
            total += top
        return total

    def expand(current: list[int], cw: float, cands: list[int]) -> None:
        nonlocal best
        cand = (clique_weight(wg, current), list(current))
        if _better(cand, best):
            best = cand
        if not cands or cw + bound(cands) < best[0] - tol:
            return
        for i, v in enumerate(cands):
            rest = cands[i:]
            if cw + bound(rest) < best[0] - tol:
                return
            nxt = [u for u in cands[i + 1:] if nbr[v] >> u & 1]
            current.append(v)
            expand(current, cw + w[v], nxt)
            current.pop()

    expand([], 0.0, order)
    return sorted(best[1])


def modified_weights(wg: WeightedGraph, subgraph: Sequence[int]) -> np.ndarray:
    """Raw weight times the summed raw weight of neighbours inside ``subgraph``.

    Returned in the order of ``subgraph``.
    """
    idx = np.asarray(subgraph, dtype=np.intp)
    if idx.size == 0:
        return np.zeros(0)
    w = wg.weights[idx]
    sub = wg.adjacency[np.ix_(idx, idx)]
    return w * (sub @ w)


def greedy_clique_search(wg: WeightedGraph) -> list[int]:
    """Repeatedly add the vertex of largest modified weight.

    After each pick the candidate set shrinks to the common neighbours of
    everything picked so far and modified weights are recomputed there.
    Modified weights within a relative ``TIE_TOLERANCE`` count as tied, so
    rounding cannot override the tie-breaks: larger raw weight, then smaller
    index. Returns sorted member indices.
    """
    cands = np.arange(len(wg.graph), dtype=np.intp)
    picked: list[int] = []
    adj = wg.adjacency
    while cands.size:
        omega = modified_weights(wg, cands)
        top = omega.max()
        tied = np.flatnonzero(omega >= top - TIE_TOLERANCE * abs(top))
        # lexsort: last key is primary; negate for descending order
        k = tied[np.lexsort((cands[tied], -wg.weights[cands[tied]]))[0]]
        v = int(cands[k])
        picked.append(v)
        cands = cands[adj[v, cands]]
    return sorted(picked)
