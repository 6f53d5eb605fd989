import itertools

import pytest
from hypothesis import given, strategies as st

from dieudonne.errors import PrecisionInsufficientError, UnsolvableError
from dieudonne.fields import get_field
from dieudonne.padic import witt_ring
from dieudonne.semilinear import (
    SemilinearMap,
    coker_ker_dims,
    compose,
    fitting_decomposition,
    fixed_points,
    from_rows,
    identity_map,
    is_nilpotent,
    linearize,
    solve_escalating,
    solve_inhomogeneous,
    stable_rank,
)

F2, F4 = get_field(2, 1), get_field(2, 2)
w = F4.gen


def brute_fixed_points(T: SemilinearMap):
    """All v over F_q with T(v) = v, by enumeration."""
    F = T.ring
    return [list(v) for v in itertools.product(list(F.elements()), repeat=T.source_dim) if T(list(v)) == list(v)]


def test_composition_examples():
    one = identity_map(F4, 1, 1)
    assert compose(one, one).twist == 2
    M = from_rows(F4, [[w]], 0)
    assert compose(M, identity_map(F4, 1, 0)).matrix == M.matrix
    D = from_rows(F4, [[w]], 1)
    DD = compose(D, D)
    assert DD.twist == 2 and DD.matrix == ((F4.one,),)


def test_fixed_point_examples():
    assert len(fixed_points(identity_map(F4, 1, 1))) == 1  # F_2 inside F_4
    T = from_rows(F4, [[w]], 1)
    basis = fixed_points(T)
    assert len(basis) == 1 and basis[0] == [w * w]
    assert sorted(v[0].v for v in brute_fixed_points(T)) == sorted([0, (w * w).v])
    N = from_rows(F4, [[F4.zero, F4.one], [F4.zero, F4.zero]], 1)
    for k in (1, 2, 3):
        assert fixed_points(N, k) == []


@pytest.mark.parametrize("seed", range(6))
def test_fixed_points_match_enumeration(seed):
    import random

    rng = random.Random(seed)
    F = get_field(3, 1) if seed % 2 else F4
    els = list(F.elements())
    T = from_rows(F, [[rng.choice(els) for _ in range(2)] for _ in range(2)], 1)
    assert F.p ** len(fixed_points(T)) == len(brute_fixed_points(T))


def test_artin_schreier_escalation():
    T = identity_map(F2, 1, 1)
    with pytest.raises(UnsolvableError):
        solve_inhomogeneous(T, [F2.one], 1)
    k, v = solve_escalating(T, [F2.one])
    assert k == 2
    x = v[0]
    assert x * x - x == x.field.one
    assert solve_inhomogeneous(T, [F2.zero]) == [F2.zero]


def test_zero_map_solution_is_minus_b():
    Z = from_rows(F4, [[F4.zero]], 1)
    assert solve_inhomogeneous(Z, [w]) == [-w]


def test_stable_rank_examples():
    assert stable_rank(identity_map(F4, 3, 1)) == 3
    N = from_rows(F4, [[F4.zero, F4.one], [F4.zero, F4.zero]], 1)
    assert stable_rank(N) == 0 and is_nilpotent(N)
    E = from_rows(F4, [[F4.one, F4.zero], [F4.zero, F4.zero]], 1)
    assert stable_rank(E) == 1


def test_fitting_examples():
    bij, nil = fitting_decomposition(identity_map(F2, 2, 1))
    assert len(bij) == 2 and nil == []
    N = from_rows(F2, [[F2.zero, F2.one], [F2.zero, F2.zero]], 1)
    bij, nil = fitting_decomposition(N)
    assert bij == [] and len(nil) == 2
    E = from_rows(F2, [[F2.one, F2.zero], [F2.zero, F2.zero]], 1)
    bij, nil = fitting_decomposition(E)
    assert bij == [[F2.one, F2.zero]] and nil == [[F2.zero, F2.one]]


def test_lengths_over_witt_vectors():
    R = witt_ring(2, 1, 2)
    assert coker_ker_dims(from_rows(R, [[R(2)]])) == (1, 1)
    assert coker_ker_dims(identity_map(R, 2)) == (0, 0)
    R3 = witt_ring(2, 1, 3)
    assert coker_ker_dims(from_rows(R3, [[R3(2), R3(1)], [R3(0), R3(2)]])) == (2, 2)
    with pytest.raises(PrecisionInsufficientError):
        coker_ker_dims(from_rows(R, [[R(4)]]))


@given(st.lists(st.integers(0, 3), min_size=4, max_size=4), st.integers(0, 3))
def test_linearization_agrees_with_application(entries, code):
    T = from_rows(F4, [[F4.from_code(e) for e in entries[:2]], [F4.from_code(e) for e in entries[2:]]], 1)
    L = linearize(T)
    v = [F4.from_code(code), F4.from_code((code + 1) % 4)]
    x = []
    for a in v:
        x.extend(a.coeffs())
    out = []
    for a in T(v):
        out.extend(a.coeffs())
    assert L.apply(x) == out


@given(st.lists(st.integers(0, 3), min_size=4, max_size=4))
def test_fitting_pieces_are_complementary(entries):
    T = from_rows(F4, [[F4.from_code(e) for e in entries[:2]], [F4.from_code(e) for e in entries[2:]]], 1)
    bij, nil = fitting_decomposition(T)
    assert len(bij) + len(nil) == 2
    assert len(bij) == stable_rank(T)
