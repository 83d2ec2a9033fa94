import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ps, state
from o2onc.gf_oracle import (EXP, LOG, GfEquation, fresh_equation, gf_inv, gf_mul,
                             matrix, rank, verify_vertex)


def slow_mul(a, b):
    """Shift-and-add multiplication modulo x^8+x^4+x^3+x+1."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        if a & 0x100:
            a ^= 0x11B
        b >>= 1
    return out


def test_published_products():
    assert gf_mul(0x57, 0x83) == 0xC1
    assert gf_mul(0x57, 0x13) == 0xFE
    assert gf_inv(0x53) == 0xCA


@given(st.integers(0, 255), st.integers(0, 255))
def test_table_mul_matches_shift_and_add(a, b):
    assert gf_mul(a, b) == slow_mul(a, b)


def test_every_nonzero_element_has_inverse():
    for a in range(1, 256):
        assert gf_mul(a, gf_inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        gf_inv(0)
    assert len(set(EXP[:255])) == 255
    assert all(EXP[LOG[a]] == a for a in range(1, 256))


def test_equation_validation():
    with pytest.raises(ValueError):
        GfEquation(ps(1, 2), (3,))
    with pytest.raises(ValueError):
        GfEquation(ps(1, 2), (3, 0))
    eq = GfEquation(ps(1, 4), (9, 17))
    assert eq.coefficient(4) == 17 and eq.coefficient(2) == 0


def test_fresh_equation_single_packet():
    eq = fresh_equation(ps(6), np.random.default_rng(3))
    assert eq.support == ps(6) and len(eq.coeffs) == 1 and eq.coeffs[0] != 0
    assert rank(matrix([eq], ps(6))) == 1


def test_fresh_equation_reproducible():
    a = fresh_equation(ps(1, 2), np.random.default_rng(42))
    b = fresh_equation(ps(1, 2), np.random.default_rng(42))
    assert a == b


def test_fresh_coefficients_never_zero():
    rng = np.random.default_rng(0)
    seen = set()
    for _ in range(2000):
        seen.update(fresh_equation(ps(0, 1, 2, 3, 4), rng).coeffs)
    assert 0 not in seen and seen == set(range(1, 256))


def test_rank_identity_and_duplicates():
    ident = [[int(i == j) for j in range(5)] for i in range(5)]
    assert rank(ident) == 5
    row = [3, 0, 7, 1]
    assert rank([row, list(row)]) == 1
    assert rank([]) == 0
    assert rank([[0, 0, 0]]) == 0


def test_rank_invariant_under_row_permutation():
    rnd = random.Random(11)
    for _ in range(200):
        rows = [[rnd.choice([0, 0, rnd.randrange(1, 256)]) for _ in range(7)]
                for _ in range(5)]
        if rnd.random() < 0.3:
            rows[4] = [gf_mul(5, v) ^ w for v, w in zip(rows[0], rows[1])]
        shuffled = list(rows)
        rnd.shuffle(shuffled)
        assert rank(rows) == rank(shuffled)
        assert rank(rows) <= 5


def test_rank_of_scaled_combination_drops():
    a = [1, 2, 3, 4]
    b = [5, 0, 9, 250]
    c = [gf_mul(7, x) ^ gf_mul(200, y) for x, y in zip(a, b)]
    assert rank([a, b, c]) == 2


def test_matrix_columns_ascending():
    eq = GfEquation(ps(8, 2, 4), (11, 22, 33))
    # support iterates ascending so the coefficients belong to 2, 4, 8
    assert matrix([eq], ps(2, 4, 8)) == [[11, 22, 33]]
    assert matrix([eq], ps(4, 8)) == [[22, 33]]


def test_stored_equations_back_vertex(coded_receiver):
    assert verify_vertex(coded_receiver, ps(2, 4, 8))
    assert verify_vertex(coded_receiver, ps(6))


def test_single_packet_vertex_without_equations():
    st_ = state(4, (0,), [(1,), (2, 3)], equations=[GfEquation(ps(2, 3), (1, 1))])
    assert verify_vertex(st_, ps(1))


def test_over_determined_vertex_rejected():
    eqs = [GfEquation(ps(2, 4), (1, 1)), GfEquation(ps(2, 4), (1, 2))]
    st_ = state(5, (0, 1, 3), [(2, 4)])
    st_.equations = eqs
    assert not verify_vertex(st_, ps(2, 4))


def test_verify_requires_tracking(plain_receiver):
    with pytest.raises(ValueError):
        verify_vertex(plain_receiver, ps(6))
