import pytest
from hypothesis import given, strategies as st

from dieudonne.errors import NotDivisibleError, PrecisionExhaustedError
from dieudonne.fields import get_field
from dieudonne.padic import (
    delta,
    divide_exact_by_p,
    embed_padic,
    teichmuller,
    verschiebung,
    verschiebung_power,
    witt_ring,
)

small_rings = st.sampled_from([(2, 1), (3, 1), (2, 2), (3, 2), (5, 1)])


@st.composite
def ring_and_elems(draw, count=2):
    p, f = draw(small_rings)
    N = draw(st.integers(2, 8))
    R = witt_ring(p, f, N)
    xs = [R.from_coeffs([draw(st.integers(0, R.pN - 1)) for _ in range(f)]) for _ in range(count)]
    return R, xs


# -- integer oracle for f = 1 ----------------------------------------------

@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 9), st.integers(), st.integers())
def test_unramified_degree_one_matches_integers(p, N, a, b):
    R = witt_ring(p, 1, N)
    m = p**N
    x, y = R(a), R(b)
    assert (x + y).c[0] == (a + b) % m
    assert (x * y).c[0] == (a * b) % m
    assert (x - y).c[0] == (a - b) % m
    assert x.frobenius() == x  # φ is the identity on Z_p


@given(st.sampled_from([2, 3, 5]), st.integers(2, 8), st.integers(0, 10**6))
def test_delta_matches_integer_formula(p, N, a):
    R = witt_ring(p, 1, N)
    expected = ((a - a**p) // p) % p ** (N - 1)
    assert delta(R(a)).c[0] == expected


def test_frobenius_examples():
    assert witt_ring(2, 1, 3)(3).frobenius() == witt_ring(2, 1, 3)(3)
    F = get_field(2, 2)
    w = F.gen
    assert teichmuller(w, 5).frobenius() == teichmuller(w * w, 5)


def test_delta_examples():
    R = witt_ring(2, 1, 6)
    R5 = witt_ring(2, 1, 5)
    assert delta(R(2)) == R5(-1)
    assert delta(R(1)) == R5(0)
    assert delta(R(3)) == R5(-3)


def test_verschiebung_examples():
    R = witt_ring(2, 1, 6)
    assert verschiebung(R(3)) ** 2 == R(36) == verschiebung(R(2 * 3**2))
    assert verschiebung(R.zero).is_zero()
    F = get_field(2, 2)
    t = teichmuller(F.gen, 4)
    assert verschiebung(t).frobenius() == t * 2


def test_teichmuller_examples():
    F3 = get_field(3, 1)
    assert teichmuller(F3(0), 2).is_zero()
    assert teichmuller(F3(1), 2) == witt_ring(3, 1, 2).one
    assert teichmuller(F3(2), 2) == witt_ring(3, 1, 2)(8)
    F4 = get_field(2, 2)
    w = F4.gen
    assert teichmuller(w, 2) * teichmuller(w * w, 2) == teichmuller(w**3, 2) == witt_ring(2, 2, 2).one


@pytest.mark.parametrize("p,f,N", [(2, 2, 6), (3, 2, 4), (2, 3, 5), (5, 1, 3)])
def test_teichmuller_is_multiplicative_and_fixed(p, f, N):
    F = get_field(p, f)
    R = witt_ring(p, f, N)
    for x in list(F.elements())[:12]:
        t = teichmuller(x, N)
        assert t**R.q == t
        assert t.residue() == x
        assert R.teichmuller_fast(x) == t
        for y in list(F.elements())[:6]:
            assert teichmuller(x * y, N) == t * teichmuller(y, N)


def test_divide_exact_examples():
    assert divide_exact_by_p(witt_ring(2, 1, 4)(12), 2) == witt_ring(2, 1, 2)(3)
    assert divide_exact_by_p(witt_ring(3, 1, 3)(6), 1) == witt_ring(3, 1, 2)(2)
    assert divide_exact_by_p(witt_ring(3, 1, 5).zero, 3).is_zero()
    with pytest.raises(NotDivisibleError):
        divide_exact_by_p(witt_ring(2, 1, 4)(6), 2)
    with pytest.raises(PrecisionExhaustedError):
        divide_exact_by_p(witt_ring(2, 1, 2).zero, 3)


@given(ring_and_elems(3))
def test_ring_axioms(data):
    R, (x, y, z) = data
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x - x == R.zero


@given(ring_and_elems(2))
def test_frobenius_is_a_ring_map_lifting_pth_power(data):
    R, (x, y) = data
    assert (x * y).frobenius() == x.frobenius() * y.frobenius()
    assert (x + y).frobenius() == x.frobenius() + y.frobenius()
    assert x.frobenius().residue() == x.residue() ** R.p
    assert x.frobenius(R.f) == x
    assert x.frobenius_inverse().frobenius() == x


@given(ring_and_elems(1))
def test_fv_and_vf_are_p(data):
    R, (x,) = data
    assert verschiebung(x).frobenius() == x * R.p == verschiebung(x.frobenius())


@given(ring_and_elems(1), st.integers(1, 3))
def test_verschiebung_power_identity(data, k):
    R, (x,) = data
    p = R.p
    assert verschiebung_power(x, k) ** p == verschiebung_power(x**p * p ** (k * (p - 1)), k)


@given(ring_and_elems(1), st.integers(1, 3))
def test_delta_of_verschiebung(data, k):
    R, (x,) = data
    p = R.p
    lhs = delta(verschiebung_power(x, k))
    rhs = verschiebung_power(x, k - 1) - verschiebung_power(x**p, k) * p ** (k * (p - 1) - 1)
    assert lhs == rhs.reduce(R.N - 1)


@given(ring_and_elems(1))
def test_inverse_of_units(data):
    R, (x,) = data
    u = x + R.one if not (x + R.one).valuation() else x * R.p + R.one
    assert u.is_unit()
    assert u * u.inverse() == R.one


@given(ring_and_elems(1))
def test_digits_round_trip(data):
    R, (x,) = data
    assert R.from_digits(x.digits()) == x
    assert x.lift(R.N + 2).reduce(R.N) == x


def test_embedding_respects_frobenius_and_products():
    small, big = witt_ring(2, 2, 4), witt_ring(2, 4, 4)
    z = small.zeta
    for a in (z, z + 3, z * z + small(5)):
        assert embed_padic(a.frobenius(), big) == embed_padic(a, big).frobenius()
        assert embed_padic(a * z, big) == embed_padic(a, big) * embed_padic(z, big)
