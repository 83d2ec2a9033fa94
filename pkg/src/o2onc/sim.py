"""Broadcast erasure delivery simulation for the completion-time study."""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from o2onc.clique import (EXACT_CAP, SizeCapExceeded, WeightedGraph,
                          greedy_clique_search, max_weight_clique_exact)
from o2onc.coding import (ImproperCliqueError, broadcast_and_update,
                          determine_combination, min_dimension_union)
from o2onc.gf_oracle import fresh_equation
from o2onc.graph import CodingGraph, Rules, build_graph
from o2onc.model import Classification, ReceiverState
from o2onc.packets import PacketSet

log = logging.getLogger(__name__)


class Scheduler(enum.Enum):
    IDNC_EXACT = "idnc-exact"
    IDNC_GREEDY = "idnc-greedy"
    O2ONC_EXACT = "o2onc-exact"
    O2ONC_GREEDY = "o2onc-greedy"
    OPTIMAL_LB = "optimal-lb"

    @property
    def aggregating(self) -> bool:
        return self in (Scheduler.O2ONC_EXACT, Scheduler.O2ONC_GREEDY)

    @property
    def exact(self) -> bool:
        return self in (Scheduler.IDNC_EXACT, Scheduler.O2ONC_EXACT)


class NoProgressError(RuntimeError):
    pass


@dataclass(frozen=True)
class Scenario:
    n: int
    epsilons: tuple[float, ...]
    initial_has: tuple[PacketSet, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one packet")
        if len(self.epsilons) != len(self.initial_has):
            raise ValueError("one erasure probability per receiver")
        if not self.epsilons:
            raise ValueError("need at least one receiver")
        for e in self.epsilons:
            if not 0.0 <= e < 1.0:
                raise ValueError(f"erasure probability {e} outside [0, 1)")
        for h in self.initial_has:
            if h.max_index() >= self.n:
                raise ValueError("Has set references packets beyond the frame")

    @property
    def m(self) -> int:
        return len(self.epsilons)

    @property
    def eps_mean(self) -> float:
        return float(np.mean(self.epsilons))

    def wants_sizes(self) -> list[int]:
        return [self.n - len(h) for h in self.initial_has]

    def with_seed(self, seed: int) -> Scenario:
        return replace(self, seed=seed)


@dataclass(frozen=True)
class ScenarioTemplate:
    """Random scenario family; ``scenario(seed)`` draws one member.

    Erasure probabilities are uniform on ``eps_mean +/- eps_spread`` with the
    half-width shrunk so the interval stays inside ``[0, 0.99]``. Each
    receiver holds each packet independently with probability ``has_prob``.
    """

    m: int
    n: int
    eps_mean: float = 0.15
    eps_spread: float = 0.10
    has_prob: float = 0.5
    master_seed: int = 0

    def scenario(self, seed: int) -> Scenario:
        rng = np.random.default_rng(np.random.SeedSequence([self.master_seed, seed, 0]))
        half = min(self.eps_spread, self.eps_mean, 0.99 - self.eps_mean)
        eps = rng.uniform(self.eps_mean - half, self.eps_mean + half, size=self.m)
        held = rng.random((self.m, self.n)) < self.has_prob
        has = tuple(PacketSet(np.flatnonzero(row)) for row in held)
        return Scenario(self.n, tuple(float(e) for e in eps), has,
                        seed=_run_seed(self.master_seed, seed))


def _run_seed(master: int, seed: int) -> int:
    return int(np.random.SeedSequence([master, seed, 1]).generate_state(1)[0])


class ErasureStreams:
    """One independent uniform stream per receiver, one draw per slot.

    Every receiver consumes a draw in every slot whether or not it is
    targeted, so different schedulers and the lower bound see identical
    channel realisations for the same seed.
    """

    BLOCK = 64

    def __init__(self, seed: int, epsilons: Sequence[float]):
        ss = np.random.SeedSequence(seed)
        children = ss.spawn(len(epsilons) + 1)
        self._gens = [np.random.default_rng(c) for c in children[:-1]]
        self.coefficients = np.random.default_rng(children[-1])
        self._eps = np.asarray(epsilons)
        self._buf = np.empty((len(epsilons), 0))
        self._pos = 0

    def next_slot(self) -> np.ndarray:
        """Boolean success mask for the next slot."""
        if self._pos >= self._buf.shape[1]:
            self._buf = np.stack([g.random(self.BLOCK) for g in self._gens])
            self._pos = 0
        u = self._buf[:, self._pos]
        self._pos += 1
        return u >= self._eps


WeightPolicy = Callable[[Sequence[ReceiverState], CodingGraph], np.ndarray]


def completion_weights(states: Sequence[ReceiverState], graph: CodingGraph) -> np.ndarray:
    """Expected remaining useful slots of each vertex's receiver."""
    per_receiver = [len(st.vertices) / (1.0 - st.epsilon) for st in states]
    return np.array([per_receiver[v.receiver] for v in graph.vertices], dtype=float)


@dataclass
class SimResult:
    scheduler: Scheduler
    seed: int
    completion_time: int
    per_slot_log: list[tuple[PacketSet, list[Classification]]] = field(default_factory=list)
    per_receiver_beneficial: list[int] = field(default_factory=list)
    oracle_divergences: int = 0
    repaired_slots: int = 0
    improper_slots: int = 0

    @property
    def beneficial_total(self) -> int:
        return sum(self.per_receiver_beneficial)


def select_clique(wg: WeightedGraph, exact: bool, cap: int = EXACT_CAP) -> list[int]:
    if exact:
        try:
            return max_weight_clique_exact(wg, cap)
        except SizeCapExceeded:
            pass
    return greedy_clique_search(wg)


def optimal_lower_bound(scenario: Scenario) -> int:
    """Slots until every receiver has had as many successes as it wants packets.

    Any linear code needs at least that many slots on the same erasure trace,
    since each useful reception needs a successful slot.
    """
    need = np.array(scenario.wants_sizes())
    if not need.any():
        return 0
    streams = ErasureStreams(scenario.seed, scenario.epsilons)
    got = np.zeros_like(need)
    slot = 0
    while np.any(got < need):
        got += streams.next_slot()
        slot += 1
    return slot


def _slot_limit(scenario: Scenario) -> int:
    expected = max(w / (1.0 - e) for w, e in zip(scenario.wants_sizes(), scenario.epsilons))
    return int(10 * max(expected, 1.0)) + 10


def run_delivery(scenario: Scenario, scheduler: Scheduler, oracle: bool = False,
                 exact_cap: int = EXACT_CAP,
                 weights: WeightPolicy = completion_weights,
                 keep_log: bool = True) -> SimResult:
    if scheduler is Scheduler.OPTIMAL_LB:
        lb = optimal_lower_bound(scenario)
        return SimResult(scheduler, scenario.seed, lb,
                         per_receiver_beneficial=scenario.wants_sizes())
    states = [ReceiverState.fresh(scenario.n, h, e, oracle)
              for h, e in zip(scenario.initial_has, scenario.epsilons)]
    aggregate = scheduler.aggregating
    rules = Rules.CONSTRAINED_BC if aggregate else Rules.IDNC_C1C2
    streams = ErasureStreams(scenario.seed, scenario.epsilons)
    result = SimResult(scheduler, scenario.seed, 0,
                       per_receiver_beneficial=[0] * scenario.m)
    limit = _slot_limit(scenario)
    slot = 0
    while any(st.vertices for st in states):
        if slot >= limit:
            raise NoProgressError(
                f"{scheduler.value} seed {scenario.seed}: not complete after {slot} slots")
        graph = build_graph(states, rules)
        wg = WeightedGraph(graph, weights(states, graph))
        members = select_clique(wg, scheduler.exact, exact_cap)
        clique = [graph.vertices[i] for i in members]
        try:
            combo = determine_combination(clique, states, aggregate=aggregate)
            if combo != min_dimension_union(clique):
                result.repaired_slots += 1
        except ImproperCliqueError as exc:
            log.warning("slot %d: %s", slot, exc)
            result.improper_slots += 1
            combo = exc.combo
        equation = fresh_equation(combo, streams.coefficients) if oracle else None
        received = streams.next_slot()
        verdicts = broadcast_and_update(combo, states, received, equation, aggregate)
        for i, v in enumerate(verdicts):
            if v.beneficial:
                result.per_receiver_beneficial[i] += 1
            if v.diverged:
                result.oracle_divergences += 1
        if keep_log:
            result.per_slot_log.append((combo, verdicts))
        slot += 1
    result.completion_time = slot
    return result


@dataclass(frozen=True)
class Row:
    scheduler: str
    seed: int
    m: int
    n: int
    eps_mean: float
    completion_time: int
    beneficial_total: int
    oracle_divergences: int


def _run_row(args) -> Row:
    template, seed, scheduler, oracle, exact_cap = args
    scenario = template.scenario(seed) if isinstance(template, ScenarioTemplate) \
        else template.with_seed(_run_seed(template.seed, seed))
    res = run_delivery(scenario, scheduler, oracle=oracle, exact_cap=exact_cap,
                       keep_log=False)
    eps_mean = template.eps_mean if isinstance(template, ScenarioTemplate) \
        else scenario.eps_mean
    return Row(scheduler.value, seed, scenario.m, scenario.n, eps_mean,
               res.completion_time, res.beneficial_total, res.oracle_divergences)


def run_batch(template: ScenarioTemplate | Scenario, seeds: Sequence[int],
              schedulers: Sequence[Scheduler], oracle: bool = False,
              exact_cap: int = EXACT_CAP, workers: int = 1) -> list[Row]:
    """One row per (seed, scheduler), ordered seed-major as given.

    A fixed ``Scenario`` keeps its side information and erasure rates and
    only varies the erasure trace per seed.
    """
    if not seeds or not schedulers:
        raise ValueError("need at least one seed and one scheduler")
    jobs = [(template, s, sch, oracle, exact_cap) for s in seeds for sch in schedulers]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_row, jobs, chunksize=4))
    return [_run_row(j) for j in jobs]
