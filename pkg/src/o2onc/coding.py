"""From a selected clique to a transmitted combination and receiver updates."""

from __future__ import annotations

from typing import Sequence

from o2onc.gf_oracle import GfEquation
from o2onc.model import (NOT_RECEIVED, Classification, ReceiverState, Vertex,
                         apply_reception, classify)
from o2onc.packets import PacketSet

SEARCH_BUDGET = 200_000


class ImproperCliqueError(RuntimeError):
    def __init__(self, combo: PacketSet, vertex: Vertex, verdict: Classification):
        super().__init__(f"combination {combo!r} does not serve r{vertex.receiver} "
                         f"{vertex.packets!r} ({verdict.verdict.value})")
        self.combo = combo
        self.vertex = vertex
        self.verdict = verdict


def min_dimension_union(clique: Sequence[Vertex]) -> PacketSet:
    """Union of the packet sets of successive minimum-dimension clique members.

    Each round takes the smallest remaining vertex (ties to the lowest
    receiver index), adds its whole packet set, and drops every remaining
    vertex overlapping it.
    """
    remaining = list(clique)
    combo = PacketSet()
    while remaining:
        pick = min(remaining, key=lambda v: (v.dimension, v.receiver, v.packets.bits))
        combo = combo | pick.packets
        remaining = [v for v in remaining if not v.packets.intersects(pick.packets)]
    return combo


def search_combination(clique: Sequence[Vertex], states: Sequence[ReceiverState],
                       aggregate: bool = True,
                       budget: int = SEARCH_BUDGET) -> PacketSet | None:
    """Backtracking search for a combination serving every clique member.

    Packets are drawn from the union of the members' packet sets. For each
    member, every packet is either held by its receiver (free), inside the
    member's own packet set, or inside some other vertex of that receiver.
    A partial choice is abandoned as soon as some member would see packets
    from two foreign vertices (one without ``aggregate``), or can no longer
    be hit. Returns ``None`` when no combination exists or ``budget`` nodes
    are exhausted.
    """
    union = PacketSet()
    for v in clique:
        union = union | v.packets
    # most widely wanted packets first, they hit the most members
    pool = sorted(union, key=lambda p: (-sum(p in v.packets for v in clique), p))
    nk = len(clique)
    FREE, OWN = -1, -2
    cls = []
    for p in pool:
        row = []
        for v in clique:
            st = states[v.receiver]
            if p in st.has:
                row.append(FREE)
            elif p in v.packets:
                row.append(OWN)
            else:
                row.append(next(j for j, z in enumerate(st.vertices) if p in z))
        cls.append(row)
    left = [sum(1 for p in pool if p in v.packets) for v in clique]
    max_foreign = 1 if aggregate else 0
    hit = [False] * nk
    foreign: list[set[int]] = [set() for _ in range(nk)]
    chosen: list[int] = []
    nodes = 0

    def dfs(t: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            return False
        if all(hit):
            return True
        if t == len(pool):
            return False
        row = cls[t]
        # include pool[t]
        ok = True
        for a in range(nk):
            c = row[a]
            if c >= 0 and c not in foreign[a] and len(foreign[a]) >= max_foreign:
                ok = False
                break
        if ok:
            saved = [(hit[a], set(foreign[a])) for a in range(nk)]
            for a in range(nk):
                c = row[a]
                if c == OWN:
                    hit[a] = True
                elif c >= 0:
                    foreign[a].add(c)
            for a in range(nk):
                if row[a] == OWN:
                    left[a] -= 1
            chosen.append(pool[t])
            if dfs(t + 1):
                return True
            chosen.pop()
            for a in range(nk):
                if row[a] == OWN:
                    left[a] += 1
                hit[a], foreign[a] = saved[a]
        # exclude pool[t]
        for a in range(nk):
            if row[a] == OWN:
                left[a] -= 1
        dead = any(not hit[a] and left[a] == 0 for a in range(nk))
        found = not dead and dfs(t + 1)
        for a in range(nk):
            if row[a] == OWN:
                left[a] += 1
        return found

    if dfs(0):
        return PacketSet(chosen)
    return None


def determine_combination(clique: Sequence[Vertex], states: Sequence[ReceiverState],
                          check: bool = True, repair: bool = True,
                          aggregate: bool = True) -> PacketSet:
    """Pick the combination to transmit for ``clique``.

    The minimum-dimension union is tried first. It is classified for every
    member; if some member is not served and ``repair`` is set, the
    backtracking search takes over. ``ImproperCliqueError`` is raised when
    no serving combination is found (with ``check`` on).
    """
    if not clique:
        raise ValueError("clique must be nonempty")
    combo = min_dimension_union(clique)
    if not check:
        return combo
    failure = _first_unserved(combo, clique, states, aggregate)
    if failure is None:
        return combo
    if repair:
        found = search_combination(clique, states, aggregate)
        if found is not None:
            return found
    raise ImproperCliqueError(combo, *failure)


def _first_unserved(combo, clique, states, aggregate):
    for v in clique:
        verdict = classify(states[v.receiver], combo, aggregate)
        if not verdict.serves(v.packets):
            return v, verdict
    return None


def broadcast_and_update(combo: PacketSet, states: Sequence[ReceiverState],
                         received: Sequence[bool],
                         equation: GfEquation | None = None,
                         aggregate: bool = True) -> list[Classification]:
    """Deliver ``combo`` to every receiver whose channel slot succeeded.

    Erased receivers get ``NOT_RECEIVED`` and are left untouched. The same
    equation (coefficients are chosen once at the sender) is handed to every
    receiver when GF tracking is on.
    """
    if not combo:
        raise ValueError("combination must be nonempty")
    out = []
    for st, ok in zip(states, received):
        if not ok:
            out.append(NOT_RECEIVED)
        elif st.complete:
            out.append(classify(st, combo, aggregate))
        else:
            out.append(apply_reception(st, combo, equation, aggregate))
    return out
