"""GF(2^8) linear-algebra audit of the set-level decoding model.

Every coded transmission is treated as one linear equation over the source
packets with random nonzero coefficients. Ranks over the unknown packets of
a vertex tell whether a receiver can actually decode (or has correctly
merged) what the set model claims.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from o2onc.packets import PacketSet

# x^8 + x^4 + x^3 + x + 1
REDUCTION_POLY = 0x11B
GENERATOR = 0x03


def _build_tables() -> tuple[list[int], list[int]]:
    exp = [0] * 510
    log = [0] * 256
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        # multiply by 3: x * 2 ^ x
        x2 = x << 1
        if x2 & 0x100:
            x2 ^= REDUCTION_POLY
        x = x2 ^ x
    for i in range(255, 510):
        exp[i] = exp[i - 255]
    return exp, log


EXP, LOG = _build_tables()


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return EXP[LOG[a] + LOG[b]]


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return EXP[255 - LOG[a]]


@dataclass(frozen=True)
class GfEquation:
    """One received coded packet: ``sum(coeffs[k] * p[support[k]])``."""

    support: PacketSet
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != len(self.support):
            raise ValueError("one coefficient per support member required")
        if any(not 0 < c < 256 for c in self.coeffs):
            raise ValueError("coefficients must be nonzero GF(256) elements")

    def coefficient(self, packet: int) -> int:
        for p, c in zip(self.support, self.coeffs):
            if p == packet:
                return c
        return 0


def fresh_equation(support: PacketSet, rng: np.random.Generator) -> GfEquation:
    if not support:
        raise ValueError("support must be nonempty")
    coeffs = rng.integers(1, 256, size=len(support))
    return GfEquation(support, tuple(int(c) for c in coeffs))


def matrix(equations: Iterable[GfEquation], variables: PacketSet) -> list[list[int]]:
    """Rows restricted to ``variables`` in ascending packet order.

    Columns outside ``variables`` are dropped, which is what a receiver does
    after subtracting packets it already holds.
    """
    cols = variables.sorted()
    rows = []
    for eq in equations:
        lookup = dict(zip(eq.support, eq.coeffs))
        rows.append([lookup.get(c, 0) for c in cols])
    return rows


def rank(rows: Sequence[Sequence[int]]) -> int:
    """Row rank over GF(2^8) by Gaussian elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = gf_inv(m[r][c])
        prow = [gf_mul(inv, v) for v in m[r]]
        m[r] = prow
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                row = m[i]
                m[i] = [a ^ gf_mul(f, b) for a, b in zip(row, prow)]
        r += 1
        if r == len(m):
            break
    return r


def equations_of(equations: Iterable[GfEquation], has: PacketSet,
                 packets: PacketSet) -> list[GfEquation]:
    """Stored equations whose unknown part falls inside ``packets``."""
    out = []
    for eq in equations:
        unknown = eq.support - has
        if unknown and unknown <= packets:
            out.append(eq)
    return out


def solves(equations: Sequence[GfEquation], variables: PacketSet, target: int) -> bool:
    return rank(matrix(equations, variables)) >= target


def reveals(equations: Sequence[GfEquation], variables: PacketSet,
            part: PacketSet) -> bool:
    """True when the system over ``variables`` determines every packet of ``part``.

    That holds exactly when dropping the ``part`` columns loses ``|part|``
    of rank.
    """
    rest = variables - part
    return rank(matrix(equations, variables)) - rank(matrix(equations, rest)) == len(part)


def verify_vertex(receiver, vertex: PacketSet) -> bool:
    """Check that a vertex is backed by ``|x| - 1`` stored equations.

    The stored system restricted to the vertex's packets must have rank
    ``|x| - 1`` and any single packet of the vertex must complete it.
    """
    if receiver.equations is None:
        raise ValueError("receiver is not tracking GF equations")
    eqs = equations_of(receiver.equations, receiver.has, vertex)
    rows = matrix(eqs, vertex)
    d = len(vertex)
    if rank(rows) != d - 1:
        return False
    for k in range(d):
        unit = [0] * d
        unit[k] = 1
        if rank(rows + [unit]) != d:
            return False
    return True
