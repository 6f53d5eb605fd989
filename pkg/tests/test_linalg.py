import itertools
import random
from math import gcd

import pytest
from hypothesis import given, strategies as st

from dieudonne.fields import get_field
from dieudonne.linalg import (
    frob_matrix,
    identity,
    is_invertible,
    kernel_field,
    kernel_mod_p,
    mat_inverse,
    mat_mul,
    rank_field,
    rank_mod_p,
    smith_form,
    smith_vals_int,
    solve_dvr,
)
from dieudonne.padic import witt_ring


def det_int(M):
    if not M:
        return 1
    if len(M) == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * det_int([row[:j] + row[j + 1:] for row in M[1:]]) for j in range(len(M)))


def vp(x, p, cap):
    if x == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return min(v, cap)


def determinantal_vals(A, p, cap):
    """Oracle: Smith valuations from gcds of k×k minors (f = 1 only)."""
    m, n = len(A), len(A[0])
    out, prev = [], 0
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, det_int([[A[i][j] for j in cols] for i in rows]))
        dk = vp(g, p, cap * k) if g else cap * k
        out.append(min(dk - prev, cap))
        prev = dk
    return out


@given(st.sampled_from([2, 3]), st.integers(1, 3), st.integers(1, 3), st.randoms(use_true_random=False))
def test_smith_valuations_match_minor_gcds(p, m, n, rnd):
    N = 6
    R = witt_ring(p, 1, N)
    A = [[rnd.choice([0, 1, p, p * p, rnd.randrange(p**N)]) for _ in range(n)] for _ in range(m)]
    sf = smith_form([[R(a) for a in row] for row in A])
    want = determinantal_vals(A, p, N)
    got = sf.vals
    assert [min(v, N) for v in got] == [min(v, N) for v in want]


@pytest.mark.parametrize("p,f", [(2, 1), (2, 2), (3, 2)])
def test_smith_transforms(p, f):
    rng = random.Random(7)
    R = witt_ring(p, f, 5)
    for _ in range(20):
        A = [[R.random(rng) * (p ** rng.randrange(3)) for _ in range(3)] for _ in range(3)]
        sf = smith_form(A)
        S = mat_mul(mat_mul(sf.U, A), sf.V)
        for i in range(3):
            for j in range(3):
                want = R(p ** sf.vals[i]) if i == j and sf.vals[i] < R.N else R.zero
                assert S[i][j] == want
        assert mat_mul(sf.U, sf.Uinv) == identity(R, 3)
        assert mat_mul(sf.V, sf.Vinv) == identity(R, 3)


def test_spec_smith_example():
    R = witt_ring(2, 1, 3)
    A = [[R(2), R(1)], [R(0), R(2)]]
    assert smith_form(A).vals == [0, 2]


def test_integer_smith_agrees_with_ring_smith():
    rng = random.Random(3)
    for _ in range(30):
        A = [[rng.randrange(27) for _ in range(3)] for _ in range(2)]
        R = witt_ring(3, 1, 3)
        ring_vals = smith_form([[R(a) for a in row] for row in A]).vals
        assert smith_vals_int(A, 3, 3)[: len(ring_vals)] == ring_vals


def test_inverse_and_invertibility():
    R = witt_ring(3, 2, 4)
    rng = random.Random(1)
    for _ in range(10):
        A = [[R.random(rng) for _ in range(3)] for _ in range(3)]
        if is_invertible(A):
            assert mat_mul(A, mat_inverse(A)) == identity(R, 3)
    assert not is_invertible([[R(3), R(0)], [R(0), R(1)]])


def test_frob_matrix_shifts():
    R = witt_ring(2, 2, 4)
    A = [[R.zeta, R(1)], [R.zeta * R.zeta, R(3)]]
    assert frob_matrix(frob_matrix(A), -1) == A
    assert frob_matrix(A, 2) == A


def test_solve_dvr():
    R = witt_ring(2, 1, 4)
    A = [[R(2), R(0)], [R(0), R(4)]]
    assert solve_dvr(A, [R(6), R(8)], R) is not None
    assert solve_dvr(A, [R(1), R(0)], R) is None
    x = solve_dvr(A, [R(6), R(8)], R)
    assert mat_mul(A, [[x[0]], [x[1]]]) == [[R(6)], [R(8)]]


def test_mod_p_kernels_by_enumeration():
    rng = random.Random(11)
    p = 3
    for _ in range(20):
        A = [[rng.randrange(p) for _ in range(4)] for _ in range(3)]
        brute = sum(
            1
            for v in itertools.product(range(p), repeat=4)
            if all(sum(a * x for a, x in zip(row, v)) % p == 0 for row in A)
        )
        assert p ** len(kernel_mod_p(A, p, 4)) == brute
        assert rank_mod_p(A, p) == 4 - len(kernel_mod_p(A, p, 4))


def test_field_rank_and_kernel():
    F = get_field(2, 2)
    w = F.gen
    A = [[F.one, w], [w, w * w]]  # second row is w times the first
    assert rank_field(A, F) == 1
    (v,) = kernel_field(A, F, 2)
    assert all((row[0] * v[0] + row[1] * v[1]).is_zero() for row in A)
