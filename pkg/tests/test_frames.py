import random
from math import comb

import pytest
from hypothesis import given, strategies as st

from dieudonne.errors import InvalidFrameError, PrecisionExhaustedError
from dieudonne.frames import monomial_frame


def test_frobenius_example():
    A = monomial_frame(2, 1, 4, {"x": 3})
    x = A.var(0)
    assert (x + 2).frobenius() == x**2 + 2
    assert (x**2).frobenius() == A.zero  # x^4 = 0


def test_relations_hold():
    A = monomial_frame(3, 2, 3, {"x": 2, "z": 3})
    x, z = A.var(0), A.var(1)
    assert (x**2).is_zero() and (z**3).is_zero()
    assert not (x * z**2).is_zero()
    assert len(A.monomials()) == 6


def test_invalid_perturbation_is_rejected():
    with pytest.raises(InvalidFrameError):
        monomial_frame(2, 1, 4, {"x": 3}, {"x": {(0,): 1}})  # φ(x) = x² + 2 leaves the ideal
    with pytest.raises(InvalidFrameError):
        monomial_frame(2, 1, 4, {"x": 0})


def test_delta_examples():
    A = monomial_frame(2, 1, 4, {"x": 3})
    B = A.with_precision(3)
    assert (A.one * 2).delta() == B.one * -1
    x = A.var(0)
    assert x.delta() == B.zero  # φ(x) = x² exactly


def rand_poly(A, rng):
    return A.poly({e: A.ring.random(rng) for e in A.monomials() if rng.random() < 0.6})


@given(st.integers(0, 10**6), st.sampled_from([(2, 1), (3, 1), (2, 2)]))
def test_delta_ring_identities(seed, pf):
    rng = random.Random(seed)
    p, f = pf
    A = monomial_frame(p, f, 4, {"x": 3, "z": 2})
    a, b = rand_poly(A, rng), rand_poly(A, rng)
    B = A.with_precision(3)
    assert (a * b).frobenius() == a.frobenius() * b.frobenius()
    assert (a + b).frobenius() == a.frobenius() + b.frobenius()
    # δ(a + b) = δ(a) + δ(b) - Σ binom(p, i)/p a^i b^{p-i}
    cross = B.zero
    for i in range(1, p):
        cross = cross + (a**i * b ** (p - i)).reduce(3) * (comb(p, i) // p)
    assert (a + b).delta() == a.delta() + b.delta() - cross
    # δ(ab) = a^p δ(b) + b^p δ(a) + p δ(a) δ(b)
    lhs = (a * b).delta()
    rhs = (a**p).reduce(3) * b.delta() + (b**p).reduce(3) * a.delta() + a.delta() * b.delta() * p
    assert lhs == rhs
    # φ(a) = a^p + p δ(a)
    assert a.frobenius() == a**p + a.delta().lift(4) * p


def test_phi_with_perturbation():
    A = monomial_frame(2, 1, 4, {"x": 3}, {"x": {(1,): 1}})
    x = A.var(0)
    assert x.frobenius() == x**2 + x * 2
    assert x.delta() == x.reduce(3)


def test_precision_variants_share_structure():
    A = monomial_frame(2, 1, 4, {"x": 3}, {"x": {(1,): 1}})
    B = A.with_precision(2)
    assert B.N == 2 and B.truncs == A.truncs
    U = A.untruncated()
    assert U.truncs == (None,)
    with pytest.raises(PrecisionExhaustedError):
        A.with_precision(1).one.delta()
