"""Fixed-capacity packet index sets backed by a Python int bitmask."""

from __future__ import annotations

from typing import Iterable, Iterator

CAPACITY = 256


class PacketSet:
    """Immutable set of source-packet indices in ``0..CAPACITY-1``.

    Set algebra maps directly onto integer bit operations, so union,
    intersection, difference and subset tests cost O(N / word).
    """

    __slots__ = ("bits",)

    def __init__(self, members: Iterable[int] = ()) -> None:
        bits = 0
        for m in members:
            m = int(m)
            if not 0 <= m < CAPACITY:
                raise IndexError(f"packet index {m} outside 0..{CAPACITY - 1}")
            bits |= 1 << m
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_bits(cls, bits: int) -> PacketSet:
        if bits < 0 or bits >> CAPACITY:
            raise IndexError("bitmask exceeds packet capacity")
        ps = cls.__new__(cls)
        object.__setattr__(ps, "bits", bits)
        return ps

    @classmethod
    def full(cls, n: int) -> PacketSet:
        """All packets ``0..n-1``."""
        return cls.from_bits((1 << n) - 1)

    def __setattr__(self, name, value):
        raise AttributeError("PacketSet is immutable")

    def __or__(self, other: PacketSet) -> PacketSet:
        return PacketSet.from_bits(self.bits | other.bits)

    def __and__(self, other: PacketSet) -> PacketSet:
        return PacketSet.from_bits(self.bits & other.bits)

    def __sub__(self, other: PacketSet) -> PacketSet:
        return PacketSet.from_bits(self.bits & ~other.bits)

    def __le__(self, other: PacketSet) -> bool:
        return self.bits & ~other.bits == 0

    def __lt__(self, other: PacketSet) -> bool:
        return self <= other and self.bits != other.bits

    def __ge__(self, other: PacketSet) -> bool:
        return other <= self

    def __gt__(self, other: PacketSet) -> bool:
        return other < self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PacketSet):
            return NotImplemented
        return self.bits == other.bits

    def __hash__(self) -> int:
        return hash(self.bits)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, idx: int) -> bool:
        return 0 <= idx < CAPACITY and (self.bits >> idx) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def isdisjoint(self, other: PacketSet) -> bool:
        return self.bits & other.bits == 0

    def intersects(self, other: PacketSet) -> bool:
        return self.bits & other.bits != 0

    def max_index(self) -> int:
        """Largest member, or -1 when empty."""
        return self.bits.bit_length() - 1

    def sorted(self) -> list[int]:
        return list(self)

    def __repr__(self) -> str:
        return "{" + ",".join(str(i) for i in self) + "}"


EMPTY = PacketSet()
