"""Coding graphs built from pairwise vertex adjacency conditions.

Three rule sets are supported:

* ``IDNC_C1C2``: the instantly decodable graph (all vertices of dimension 1).
  Two vertices are adjacent when they want the same packet, or each wants a
  packet the other's receiver already holds.
* ``SIMPLE_BC``: adjacency on any packet-set overlap, or on disjoint sets
  where each vertex has at least one packet held by the other receiver.
  ``SIMPLE_BC1`` keeps only the overlap part.
* ``CONSTRAINED_BC``: overlap edges restricted by dimension so that every
  clique can be served by one combination, and disjoint edges only when each
  packet set lies entirely in the other receiver's Has set.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from o2onc.model import ReceiverState, Vertex, classify
from o2onc.packets import PacketSet

BRUTE_FORCE_LIMIT = 20


class Rules(enum.Enum):
    IDNC_C1C2 = "idnc"
    SIMPLE_BC = "simple"
    SIMPLE_BC1 = "simple-bc1"
    CONSTRAINED_BC = "constrained"


class DimensionError(ValueError):
    pass


class CapacityError(ValueError):
    pass


def adjacent_idnc(vi: Vertex, vk: Vertex, hi: PacketSet, hk: PacketSet) -> bool:
    if vi.dimension != 1 or vk.dimension != 1:
        raise DimensionError("IDNC adjacency needs dimension-1 vertices")
    x, y = vi.packets, vk.packets
    return x == y or (x <= hk and y <= hi)


def adjacent_simple(vi: Vertex, vk: Vertex, hi: PacketSet, hk: PacketSet) -> bool:
    x, y = vi.packets, vk.packets
    if x.intersects(y):
        return True
    return x.intersects(hk) and y.intersects(hi)


def adjacent_bc1star(x: PacketSet, y: PacketSet, hk: PacketSet) -> bool:
    """Overlap condition with ``|x| <= |y|``; ``hk`` is the Has set of y's receiver."""
    if not x.intersects(y):
        raise ValueError("overlap condition needs intersecting packet sets")
    dx, dy = len(x), len(y)
    if dx > dy:
        raise ValueError("pass the smaller packet set first")
    if dx == 1:
        return x <= y
    if dx == dy:
        return len(x & y) >= dx - 1
    unknown = x - hk
    return len(unknown & y) >= len(unknown) - 1


def adjacent_bc2star(vi: Vertex, vk: Vertex, hi: PacketSet, hk: PacketSet) -> bool:
    x, y = vi.packets, vk.packets
    if x.intersects(y):
        raise ValueError("disjoint condition needs disjoint packet sets")
    return x <= hk and y <= hi


def adjacent_constrained(vi: Vertex, vk: Vertex, hi: PacketSet, hk: PacketSet) -> bool:
    x, y = vi.packets, vk.packets
    if not x.intersects(y):
        return adjacent_bc2star(vi, vk, hi, hk)
    if len(x) <= len(y):
        return adjacent_bc1star(x, y, hk)
    return adjacent_bc1star(y, x, hi)


def _pair_rule(rules: Rules):
    if rules is Rules.IDNC_C1C2:
        return adjacent_idnc
    if rules is Rules.SIMPLE_BC:
        return adjacent_simple
    if rules is Rules.SIMPLE_BC1:
        return lambda vi, vk, hi, hk: vi.packets.intersects(vk.packets)
    return adjacent_constrained


@dataclass
class CodingGraph:
    vertices: list[Vertex]
    adjacency: np.ndarray
    rules: Rules

    def __len__(self) -> int:
        return len(self.vertices)

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[v])

    def is_clique(self, members: Sequence[int]) -> bool:
        members = list(members)
        sub = self.adjacency[np.ix_(members, members)]
        return bool(sub.sum() == len(members) * (len(members) - 1))

    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2

    def to_text(self) -> str:
        """Adjacency list, one line per vertex: ``index receiver {packets}: neighbors``."""
        lines = []
        for i, v in enumerate(self.vertices):
            nb = " ".join(str(j) for j in self.neighbors(i))
            lines.append(f"{i} r{v.receiver} {v.packets!r}: {nb}".rstrip())
        return "\n".join(lines) + "\n"


def graph_vertices(states: Sequence[ReceiverState]) -> list[Vertex]:
    return [Vertex(i, x) for i, st in enumerate(states) for x in st.vertices]


def build_graph(states: Sequence[ReceiverState], rules: Rules = Rules.CONSTRAINED_BC,
                vertices: Sequence[Vertex] | None = None) -> CodingGraph:
    """Build the coding graph with dense matrix arithmetic.

    ``vertices`` restricts the graph to a subset (default: every vertex of
    every receiver). Pairwise counts come from two products: packet-set
    overlaps ``|x & y|`` and ``|x - H_k|`` for every vertex/receiver pair.
    """
    verts = graph_vertices(states) if vertices is None else list(vertices)
    nv = len(verts)
    if nv == 0:
        return CodingGraph([], np.zeros((0, 0), dtype=bool), rules)
    n = states[0].n
    X = np.zeros((nv, n), dtype=np.float32)
    for r, v in enumerate(verts):
        X[r, list(v.packets)] = 1.0
    W = np.zeros((len(states), n), dtype=np.float32)
    for k, st in enumerate(states):
        W[k, list(st.wants)] = 1.0
    recv = np.fromiter((v.receiver for v in verts), dtype=np.intp, count=nv)
    dim = X.sum(axis=1)
    if rules is Rules.IDNC_C1C2 and np.any(dim != 1):
        raise DimensionError("IDNC graph needs dimension-1 vertices")

    inter = X @ X.T
    # out[u, v] = |x_u - H_k| with k the receiver of v
    out = (X @ W.T)[:, recv]
    overlap = inter > 0
    du = dim[:, None]
    dv = dim[None, :]

    if rules is Rules.SIMPLE_BC1:
        adj = overlap
    elif rules is Rules.SIMPLE_BC:
        adj = overlap | ((out < du) & (out.T < dv))
    else:
        disjoint = ~overlap & (out == 0) & (out.T == 0)
        # condition evaluated with the row vertex as the smaller one;
        # |(x - H_k) & y| equals |x & y| because y lies in W_k
        small = np.where(du == 1, True,
                         np.where(du == dv, inter >= du - 1, inter >= out - 1))
        adj = (overlap & np.where(du <= dv, small, small.T)) | disjoint
    adj = adj & (recv[:, None] != recv[None, :])
    return CodingGraph(verts, np.ascontiguousarray(adj), rules)


def build_graph_pairwise(states: Sequence[ReceiverState],
                         rules: Rules = Rules.CONSTRAINED_BC) -> CodingGraph:
    """Reference construction calling the scalar condition on every pair."""
    verts = graph_vertices(states)
    rule = _pair_rule(rules)
    adj = np.zeros((len(verts), len(verts)), dtype=bool)
    for a, b in itertools.combinations(range(len(verts)), 2):
        va, vb = verts[a], verts[b]
        if va.receiver == vb.receiver:
            continue
        if rule(va, vb, states[va.receiver].has, states[vb.receiver].has):
            adj[a, b] = adj[b, a] = True
    return CodingGraph(verts, adj, rules)


def benefits_all(combo: PacketSet, vertices: Sequence[Vertex],
                 states: Sequence[ReceiverState]) -> bool:
    """True when ``combo`` decodes or aggregates every listed vertex."""
    for v in vertices:
        if not classify(states[v.receiver], combo).serves(v.packets):
            return False
    return True


def exists_benefiting_combination(vertices: Sequence[Vertex],
                                  states: Sequence[ReceiverState]) -> PacketSet | None:
    """Brute-force search for one combination serving every vertex.

    Only subsets of the union of the vertices' packet sets are tried. Adding
    a packet outside that union can only enlarge the set of vertices a
    receiver sees in the combination, so it never turns a failure into a
    success.
    """
    if not vertices:
        return None
    union = PacketSet()
    for v in vertices:
        union = union | v.packets
    pool = union.sorted()
    if len(pool) > BRUTE_FORCE_LIMIT:
        raise CapacityError(f"{len(pool)} candidate packets exceed the enumeration limit")
    for size in range(1, len(pool) + 1):
        for subset in itertools.combinations(pool, size):
            combo = PacketSet(subset)
            if benefits_all(combo, vertices, states):
                return combo
    return None
