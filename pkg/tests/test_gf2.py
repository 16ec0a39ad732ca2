from collections import Counter
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsefht.gf2 import (
    GF2Matrix,
    SingularMatrixError,
    bits_to_int,
    circular_shift_matrix,
    gf2_inner_product,
    gl_order,
    mat_inverse,
    mat_mul,
    mat_vec_mul,
    random_invertible,
    rank,
    selection_matrix,
)


def explicit_inner(u_bits, v_bits):
    return sum(a * b for a, b in zip(u_bits, v_bits)) % 2


def test_inner_product_examples():
    assert gf2_inner_product(0b11, 0b11, 2) == 0
    assert gf2_inner_product(0, 0b10110, 5) == 0
    u, v = [1, 0, 1], [1, 1, 1]
    assert gf2_inner_product(bits_to_int(u), bits_to_int(v), 3) == explicit_inner(u, v) == 0


def test_inner_product_width_mismatch():
    with pytest.raises(ValueError):
        gf2_inner_product(0b1000, 0b1, 3)


def test_self_inner_product_of_pairs_vanishes():
    # <u,u> is the weight parity; for the all-ones 2-vector it is 0
    for u in range(16):
        assert gf2_inner_product(u, u) == bin(u).count("1") % 2


@settings(max_examples=200)
@given(st.integers(1, 32).flatmap(lambda n: st.tuples(*[st.integers(0, 2**n - 1)] * 3)))
def test_inner_product_linearity(uvw):
    u, v, w = uvw
    assert gf2_inner_product(u ^ v, w) == gf2_inner_product(u, w) ^ gf2_inner_product(v, w)


def test_inner_product_vectorised_matches_scalar():
    rng = np.random.default_rng(1)
    u = rng.integers(0, 2**40, size=100)
    v = rng.integers(0, 2**40, size=100)
    vec = gf2_inner_product(u, v)
    assert [int(a) for a in vec] == [gf2_inner_product(int(a), int(b)) for a, b in zip(u, v)]


def test_mat_vec_examples():
    assert mat_vec_mul(GF2Matrix.identity(3), 0b101) == 0b101
    assert mat_vec_mul(GF2Matrix.zeros(3, 3), 0b111) == 0
    # rotating the identity's columns left by one sends e_0 to e_1
    assert mat_vec_mul(circular_shift_matrix(4, 1), 0b0001) == 0b0010


def test_mat_vec_dimension_mismatch():
    with pytest.raises(ValueError):
        mat_vec_mul(GF2Matrix.identity(3), 0b1000)


def test_mat_vec_against_dense_oracle():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a = rng.integers(0, 2, size=(7, 9))
        v = rng.integers(0, 2, size=9)
        m = GF2Matrix.from_array(a)
        expected = bits_to_int((a @ v % 2).tolist())
        assert m.matvec(bits_to_int(v.tolist())) == expected
        assert int(m.matvec(np.array([bits_to_int(v.tolist())]))[0]) == expected


def test_mat_mul_examples():
    a = GF2Matrix.from_array([[1, 0, 1], [1, 1, 0]])
    assert mat_mul(a, GF2Matrix.identity(3)) == a
    m = GF2Matrix.from_array([[1, 1], [0, 1]])
    assert mat_mul(m, m) == GF2Matrix.identity(2)
    for n in (3, 5, 8):
        for s in range(n):
            assert mat_mul(circular_shift_matrix(n, s), circular_shift_matrix(n, (n - s) % n)) == GF2Matrix.identity(n)


def test_mat_mul_against_dense_oracle():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 2, size=(5, 6))
    b = rng.integers(0, 2, size=(6, 4))
    assert mat_mul(GF2Matrix.from_array(a), GF2Matrix.from_array(b)) == GF2Matrix.from_array(a @ b % 2)
    with pytest.raises(ValueError):
        mat_mul(GF2Matrix.from_array(a), GF2Matrix.from_array(a))


def test_inverse_examples():
    assert mat_inverse(GF2Matrix.identity(4)) == GF2Matrix.identity(4)
    m = GF2Matrix.from_array([[1, 1], [0, 1]])
    assert mat_inverse(m) == m
    with pytest.raises(SingularMatrixError):
        mat_inverse(GF2Matrix.from_array([[1, 1], [1, 1]]))
    with pytest.raises(ValueError):
        mat_inverse(GF2Matrix.from_array([[1, 0, 0], [0, 1, 0]]))


def test_inverse_of_shift_is_opposite_shift():
    for n in (4, 6, 9):
        for s in range(n):
            assert mat_inverse(circular_shift_matrix(n, s)) == circular_shift_matrix(n, (n - s) % n)


def test_inverse_round_trip_random():
    rng = np.random.default_rng(4)
    for trial in range(1000):
        n = 2 + trial % 15
        m = random_invertible(n, rng)
        assert mat_mul(m, mat_inverse(m)) == GF2Matrix.identity(n)
        assert mat_mul(mat_inverse(m), m) == GF2Matrix.identity(n)


def test_shift_matrix_columns_and_identity():
    assert circular_shift_matrix(5, 0) == GF2Matrix.identity(5)
    m = circular_shift_matrix(6, 2)
    assert m.columns() == [1 << ((j + 2) % 6) for j in range(6)]
    with pytest.raises(ValueError):
        circular_shift_matrix(4, 4)


def test_selection_matrix_reads_positions():
    m = selection_matrix(6, [4, 5, 0, 1])
    # last four columns are e_4, e_5, e_0, e_1
    assert m.columns()[2:] == [1 << 4, 1 << 5, 1 << 0, 1 << 1]
    assert m.is_invertible()


def enumerate_gl(n):
    count = 0
    for bits in product((0, 1), repeat=n * n):
        if rank(GF2Matrix.from_array(np.array(bits).reshape(n, n))) == n:
            count += 1
    return count


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 6), (3, 168)])
def test_gl_order_by_enumeration(n, expected):
    assert enumerate_gl(n) == expected == gl_order(n)


def test_random_invertible_n1():
    rng = np.random.default_rng(5)
    for _ in range(20):
        assert random_invertible(1, rng) == GF2Matrix(1, 1, (1,))


def test_random_invertible_uniform_over_gl2():
    rng = np.random.default_rng(6)
    draws = 6000
    counts = Counter(random_invertible(2, rng).rows for _ in range(draws))
    assert len(counts) == 6
    p = 1 / 6
    sigma = np.sqrt(draws * p * (1 - p))
    for c in counts.values():
        assert abs(c - draws * p) <= 3 * sigma


def test_invertible_fraction_of_uniform_matrices():
    rng = np.random.default_rng(7)
    for n in (4, 8, 16):
        draws = 10_000
        hits = 0
        for _ in range(draws):
            rows = tuple(int(r) for r in rng.integers(0, 1 << n, size=n))
            hits += rank(GF2Matrix(n, n, rows)) == n
        assert hits / draws >= 0.28


def test_text_round_trip():
    rng = np.random.default_rng(8)
    m = random_invertible(7, rng)
    text = m.to_text()
    assert text.splitlines()[0] == "7 7"
    # rows are written LSB first
    assert text.splitlines()[1] == "".join(str((m.rows[0] >> t) & 1) for t in range(7))
    assert GF2Matrix.from_text(text) == m
    for bad in ("", "2 2\n10\n", "2 2\n10\n1x\n", "a b\n"):
        with pytest.raises(ValueError):
            GF2Matrix.from_text(bad)
