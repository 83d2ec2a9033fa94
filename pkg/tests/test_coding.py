import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import improper_instance, ps, random_states, state
from o2onc.coding import (ImproperCliqueError, broadcast_and_update,
                          determine_combination, min_dimension_union, search_combination)
from o2onc.graph import build_graph, exists_benefiting_combination
from o2onc.model import Verdict, Vertex, classify


def test_three_member_union():
    states = [state(5, (0, 3, 4), [(1, 2)]),
              state(5, (0, 1, 2), [(3, 4)]),
              state(5, (0, 2, 4), [(1, 3)])]
    clique = [Vertex(0, ps(1, 2)), Vertex(1, ps(3, 4)), Vertex(2, ps(1, 3))]
    g = build_graph(states)
    assert g.is_clique([0, 1, 2])
    combo = determine_combination(clique, states)
    assert combo == ps(1, 2, 3, 4) == min_dimension_union(clique)
    for m in clique:
        c = classify(states[m.receiver], combo)
        assert c.verdict is Verdict.DECODES and c.targets == (m.packets,)


def test_singleton_and_shared_packet():
    states = [state(3, (0, 1), [(2,)]), state(3, (0,), [(2,), (1,)])]
    assert determine_combination([Vertex(0, ps(2))], states) == ps(2)
    assert determine_combination([Vertex(0, ps(2)), Vertex(1, ps(2))], states) == ps(2)
    with pytest.raises(ValueError):
        determine_combination([], states)


def union_failure_instance():
    states = [state(4, (), [(1,), (0,), (2, 3)]),
              state(4, (1, 3), [(0,), (2,)]),
              state(4, (0, 1, 2), [(3,)]),
              state(4, (3,), [(0, 1, 2)])]
    return states, [Vertex(0, ps(2, 3)), Vertex(2, ps(3)), Vertex(3, ps(0, 1, 2))]


def test_union_can_fail_and_is_repaired():
    states, clique = union_failure_instance()
    g = build_graph(states)
    idx = [g.vertices.index(m) for m in clique]
    assert g.is_clique(idx)
    raw = min_dimension_union(clique)
    assert raw == ps(0, 1, 2, 3)
    assert classify(states[0], raw).verdict is Verdict.DISCARDABLE
    with pytest.raises(ImproperCliqueError):
        determine_combination(clique, states, repair=False)
    combo = determine_combination(clique, states)
    assert all(classify(states[m.receiver], combo).serves(m.packets) for m in clique)


def test_search_reports_impossible():
    states, members = improper_instance()
    assert search_combination(members, states) is None
    with pytest.raises(ImproperCliqueError):
        determine_combination(members, states)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_every_constrained_clique_is_served(seed):
    rnd = random.Random(seed)
    states = random_states(rnd, rnd.randint(1, 5), rnd.randint(1, 9))
    g = build_graph(states)
    for c in nx.enumerate_all_cliques(nx.from_numpy_array(g.adjacency.astype(int))):
        clique = [g.vertices[i] for i in c]
        combo = determine_combination(clique, states)
        for m in clique:
            assert classify(states[m.receiver], combo).serves(m.packets)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_search_agrees_with_brute_force(seed, aggregate):
    rnd = random.Random(seed)
    states = random_states(rnd, rnd.randint(2, 5), rnd.randint(2, 9))
    verts = [Vertex(i, rnd.choice(s.vertices)) for i, s in enumerate(states) if s.vertices]
    if not verts:
        return
    found = search_combination(verts, states, aggregate)
    if aggregate:
        assert (found is None) == (exists_benefiting_combination(verts, states) is None)
    if found is not None:
        for m in verts:
            assert classify(states[m.receiver], found, aggregate).serves(m.packets)


def test_broadcast_perfect_channel_serves_clique():
    rnd = random.Random(4)
    for _ in range(100):
        states = random_states(rnd, rnd.randint(1, 6), rnd.randint(1, 10))
        g = build_graph(states)
        if not len(g):
            continue
        cliques = list(nx.find_cliques(nx.from_numpy_array(g.adjacency.astype(int))))
        clique = [g.vertices[i] for i in rnd.choice(cliques)]
        combo = determine_combination(clique, states)
        out = broadcast_and_update(combo, states, [True] * len(states))
        for m in clique:
            assert out[m.receiver].verdict in (Verdict.DECODES, Verdict.AGGREGATES)


def test_broadcast_erasures_and_bystanders():
    states = [state(4, (0, 1), [(2,), (3,)]), state(4, (0, 1, 2, 3), [])]
    out = broadcast_and_update(ps(2), states, [False, True])
    assert out[0].verdict is Verdict.NOT_RECEIVED
    assert states[0].vertices == [ps(2), ps(3)]
    assert out[1].verdict is Verdict.NON_INNOVATIVE
    bystander = state(4, (0, 1, 2), [(3,)])
    out = broadcast_and_update(ps(1, 2), [bystander], [True])
    assert out[0].verdict is Verdict.NON_INNOVATIVE and bystander.vertices == [ps(3)]
