"""Receiver side information, generalized vertices and reception handling."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from o2onc import gf_oracle
from o2onc.gf_oracle import GfEquation
from o2onc.packets import PacketSet


class InconsistentStateError(RuntimeError):
    pass


class Verdict(enum.Enum):
    NON_INNOVATIVE = "non_innovative"
    DECODES = "decodes"
    AGGREGATES = "aggregates"
    DISCARDABLE = "discardable"
    NOT_RECEIVED = "not_received"


@dataclass(frozen=True)
class Classification:
    """What a coded packet means to one receiver.

    ``targets`` holds the packet sets of the vertex decoded (one entry) or
    the two vertices merged (two entries). ``singular`` marks a reception the
    set model called beneficial but the GF equations could not use.
    ``revealed`` marks a set-level aggregation that the GF equations turned
    into decoding one of the two vertices outright.
    """

    verdict: Verdict
    targets: tuple[PacketSet, ...] = ()
    singular: bool = False
    revealed: bool = False

    @property
    def diverged(self) -> bool:
        return self.singular or self.revealed

    @property
    def beneficial(self) -> bool:
        return self.verdict in (Verdict.DECODES, Verdict.AGGREGATES)

    def serves(self, packets: PacketSet) -> bool:
        return self.beneficial and packets in self.targets


NON_INNOVATIVE = Classification(Verdict.NON_INNOVATIVE)
DISCARDABLE = Classification(Verdict.DISCARDABLE)
NOT_RECEIVED = Classification(Verdict.NOT_RECEIVED)


@dataclass(frozen=True)
class Vertex:
    receiver: int
    packets: PacketSet

    @property
    def dimension(self) -> int:
        return len(self.packets)


@dataclass
class ReceiverState:
    """Has set plus the vertices partitioning the Wants set.

    ``equations`` is ``None`` unless GF tracking is on; then it holds every
    stored coded packet that is not yet fully decoded.
    """

    n: int
    has: PacketSet
    vertices: list[PacketSet]
    epsilon: float = 0.0
    equations: list[GfEquation] | None = None

    @classmethod
    def fresh(cls, n: int, has: PacketSet, epsilon: float = 0.0,
              oracle: bool = False) -> ReceiverState:
        """State before any coded transmission: one vertex per wanted packet."""
        if has.max_index() >= n:
            raise IndexError("Has set references packets beyond the frame")
        wants = PacketSet.full(n) - has
        return cls(n, has, [PacketSet.from_bits(1 << p) for p in wants], epsilon,
                   [] if oracle else None)

    @property
    def wants(self) -> PacketSet:
        return PacketSet.full(self.n) - self.has

    @property
    def complete(self) -> bool:
        return not self.vertices

    def vertex_equations(self, packets: PacketSet) -> list[GfEquation]:
        if self.equations is None:
            return []
        return gf_oracle.equations_of(self.equations, self.has, packets)

    def copy(self) -> ReceiverState:
        return ReceiverState(self.n, self.has, list(self.vertices), self.epsilon,
                             None if self.equations is None else list(self.equations))

    def check(self) -> None:
        """Raise ``InconsistentStateError`` if the partition invariant fails."""
        seen = 0
        for x in self.vertices:
            if not x:
                raise InconsistentStateError("empty vertex")
            if x.bits & seen:
                raise InconsistentStateError(f"vertex {x} overlaps another vertex")
            seen |= x.bits
        if seen & self.has.bits:
            raise InconsistentStateError("vertex packets overlap the Has set")
        if seen != self.wants.bits:
            raise InconsistentStateError("vertices do not cover the Wants set")
        if self.equations is not None:
            for x in self.vertices:
                k = len(self.vertex_equations(x))
                if k != len(x) - 1:
                    raise InconsistentStateError(
                        f"vertex {x} backed by {k} equations, expected {len(x) - 1}")


def classify(receiver: ReceiverState, combo: PacketSet,
             aggregate: bool = True) -> Classification:
    """Classify ``combo`` against the receiver's vertices.

    With ``aggregate=False`` (IDNC receivers) anything that is not instantly
    decodable is discardable.
    """
    if not combo:
        raise ValueError("combination must be nonempty")
    if combo.max_index() >= receiver.n:
        raise IndexError(f"combination {combo} references packets beyond N={receiver.n}")
    rest = combo.bits & ~receiver.has.bits
    if not rest:
        return NON_INNOVATIVE
    hits = []
    for x in receiver.vertices:
        if x.bits & rest:
            hits.append(x)
            if len(hits) > 2:
                return DISCARDABLE
    if len(hits) == 1:
        return Classification(Verdict.DECODES, (hits[0],))
    if len(hits) == 2 and aggregate:
        return Classification(Verdict.AGGREGATES, (hits[0], hits[1]))
    return DISCARDABLE


def _usable(receiver: ReceiverState, verdict: Classification, eq: GfEquation) -> bool:
    variables = PacketSet()
    for x in verdict.targets:
        variables = variables | x
    stored = receiver.vertex_equations(variables)
    target = len(variables) if verdict.verdict is Verdict.DECODES else len(variables) - 1
    return gf_oracle.solves(stored + [eq], variables, target)


def _resolve_aggregation(receiver: ReceiverState, verdict: Classification,
                         eq: GfEquation) -> Classification:
    # one equation short of both sides, so at most one can be determined
    x, y = verdict.targets
    system = receiver.vertex_equations(x | y) + [eq]
    for part in (x, y):
        if gf_oracle.reveals(system, x | y, part):
            return Classification(Verdict.DECODES, (part,), revealed=True)
    return verdict


def apply_reception(receiver: ReceiverState, combo: PacketSet,
                    equation: GfEquation | None = None,
                    aggregate: bool = True) -> Classification:
    """Update ``receiver`` after it successfully receives ``combo``.

    Decoding removes the vertex and moves its packets into the Has set;
    aggregation replaces both vertices with their union and stores the
    equation. Returns the classification acted upon. With GF tracking this
    is a singular ``NON_INNOVATIVE`` when the equations reject a set-level
    benefit, and a revealed ``DECODES`` when an aggregation happens to
    determine one of its two vertices.
    """
    verdict = classify(receiver, combo, aggregate)
    if not verdict.beneficial:
        return verdict
    if receiver.equations is not None:
        if equation is None:
            raise ValueError("GF tracking is on but no equation was supplied")
        if equation.support != combo:
            raise ValueError("equation support differs from the combination")
        if not _usable(receiver, verdict, equation):
            return Classification(Verdict.NON_INNOVATIVE, verdict.targets, singular=True)
        if verdict.verdict is Verdict.AGGREGATES:
            verdict = _resolve_aggregation(receiver, verdict, equation)

    if verdict.verdict is Verdict.DECODES:
        (x,) = verdict.targets
        receiver.vertices.remove(x)
        if receiver.equations is not None:
            mine = {id(e) for e in receiver.vertex_equations(x)}
            receiver.equations = [e for e in receiver.equations if id(e) not in mine]
        receiver.has = receiver.has | x
    else:
        x, y = verdict.targets
        i = receiver.vertices.index(x)
        receiver.vertices[i] = x | y
        receiver.vertices.remove(y)
        if receiver.equations is not None:
            receiver.equations.append(equation)
    receiver.check()
    return verdict
