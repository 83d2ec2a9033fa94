import random

import pytest

from o2onc.gf_oracle import GfEquation
from o2onc.model import ReceiverState, Vertex
from o2onc.packets import PacketSet


def ps(*members):
    return PacketSet(members)


def state(n, has, vertices, epsilon=0.0, equations=None):
    st = ReceiverState(n, PacketSet(has), [PacketSet(v) for v in vertices], epsilon,
                       equations)
    st.check()
    return st


def random_state(rng: random.Random, n: int, has_prob: float = 0.5,
                 max_dim: int = 4) -> ReceiverState:
    """Random Has set, Wants split into random blocks of size 1..max_dim."""
    has = PacketSet(p for p in range(n) if rng.random() < has_prob)
    wants = [p for p in range(n) if p not in has]
    rng.shuffle(wants)
    vertices = []
    while wants:
        d = rng.randint(1, max_dim)
        vertices.append(PacketSet(wants[:d]))
        wants = wants[d:]
    return ReceiverState(n, has, vertices)


def random_states(rng, m, n, has_prob=0.5, max_dim=4):
    return [random_state(rng, n, has_prob, max_dim) for _ in range(m)]


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def report(request):
    """Record one verdict line per acceptance criterion."""
    def record(criterion, ok, detail):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.stash[ACCEPTANCE].append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


# Example states use 1-based packet labels; index 0 is padding
# held by every receiver so it never matters.
LABELLED_N = 9
LABELLED_HAS = (0, 1, 3, 5, 7)


@pytest.fixture
def coded_receiver():
    """Receiver holding 1,3,5,7 with stored equations over {1,2,4} and {3,4,7,8}."""
    pa = GfEquation(ps(1, 2, 4), (7, 19, 201))
    pb = GfEquation(ps(3, 4, 7, 8), (3, 88, 5, 140))
    return state(LABELLED_N, LABELLED_HAS, [(2, 4, 8), (6,)], equations=[pa, pb])


@pytest.fixture
def plain_receiver():
    return state(LABELLED_N, LABELLED_HAS, [(2, 4, 8), (6,)])


# found by randomized search over four receivers each wanting a disjoint pair
IMPROPER_HAS = [(2, 4, 6), (0, 5, 7), (1, 3, 7), (1, 3, 4)]


def improper_instance():
    states = []
    for i, has in enumerate(IMPROPER_HAS):
        pair = (2 * i, 2 * i + 1)
        rest = [p for p in range(8) if p not in has and p not in pair]
        states.append(state(8, has, [pair] + [(p,) for p in rest]))
    return states, [Vertex(i, ps(2 * i, 2 * i + 1)) for i in range(4)]
