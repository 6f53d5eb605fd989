import itertools

import pytest

from dieudonne.errors import FieldError
from dieudonne.fields import embed, get_field, is_primitive


def naive_polymul(a, b, mod, p):
    """Schoolbook product of coefficient lists reduced by a monic modulus."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    f = len(mod) - 1
    for k in range(len(prod) - 1, f - 1, -1):
        c = prod[k]
        if c:
            for t in range(f + 1):
                prod[k - f + t] = (prod[k - f + t] - c * mod[t]) % p
    return (prod + [0] * f)[:f]


@pytest.mark.parametrize("p,f", [(2, 1), (2, 2), (2, 3), (3, 2), (5, 1), (7, 2)])
def test_multiplication_matches_schoolbook(p, f):
    F = get_field(p, f)
    elems = list(F.elements())
    for a, b in itertools.product(elems[:20], elems[:20]):
        assert (a * b).coeffs() == naive_polymul(a.coeffs(), b.coeffs(), F.modulus, p)


@pytest.mark.parametrize("p,f", [(2, 2), (2, 4), (3, 3), (5, 2)])
def test_generator_is_primitive(p, f):
    F = get_field(p, f)
    g = F.gen
    seen = set()
    x = F.one
    for _ in range(F.q - 1):
        seen.add(x.v)
        x = x * g
    assert len(seen) == F.q - 1
    assert is_primitive(F.modulus, p)


def test_conway_polynomials_are_used_for_small_fields():
    # Conway polynomials, low degree coefficient first
    assert tuple(get_field(2, 2).modulus) == (1, 1, 1)
    assert tuple(get_field(2, 3).modulus) == (1, 1, 0, 1)
    assert tuple(get_field(3, 2).modulus) == (2, 2, 1)


def test_frobenius_is_pth_power():
    F = get_field(3, 2)
    for a in F.elements():
        assert a.frobenius(1) == a**3
        assert a.frobenius(2) == a
        assert a.frobenius(-1).frobenius(1) == a


def test_embedding_is_a_ring_map():
    small, big = get_field(2, 2), get_field(2, 4)
    for a, b in itertools.product(small.elements(), repeat=2):
        assert embed(a * b, big) == embed(a, big) * embed(b, big)
        assert embed(a + b, big) == embed(a, big) + embed(b, big)


def test_log_inverts_powers():
    F = get_field(2, 5)
    g = F.gen
    for k in (0, 1, 7, 30):
        assert F.log(g**k) == k


def test_rejects_composite_characteristic():
    with pytest.raises(FieldError):
        get_field(4, 1)
