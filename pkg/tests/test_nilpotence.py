import random

import pytest
from hypothesis import given, settings, strategies as st

from dieudonne.errors import InvalidFrameError, NonLocalFrameError
from dieudonne.frames import MonomialFrame, monomial_frame
from dieudonne.nilpotence import (
    ReductionRing,
    _span,
    alpha_p_elements,
    artin_schreier_cohomology,
    compatibility_square,
    dejong_report,
    divided_frobenius,
    gamma,
    gamma_nilpotence,
    mu_p_elements,
    verify_mu_alpha_bijection,
)

FRAME_SHAPES = [
    (2, 1, 4, {"x": 3}, None),
    (2, 1, 4, {"x": 2, "z": 2}, None),
    (2, 1, 4, {"x": 3}, {"x": {(1,): 1}}),
    (2, 1, 4, {"x": 4, "z": 3}, None),
    (3, 1, 3, {"x": 5}, None),
    (2, 2, 3, {"x": 3, "z": 2}, None),
    (3, 1, 3, {"x": 4}, {"x": {(2,): 1}}),
]


def frames():
    return [monomial_frame(*shape) for shape in FRAME_SHAPES]


def R1(frame):
    return ReductionRing(frame)


def test_alpha_p_examples():
    A = monomial_frame(2, 1, 4, {"x": 3})
    R = R1(A)
    x = R.A1.var(0)
    assert alpha_p_elements(R) == [x**2]
    B = monomial_frame(2, 1, 4, {"x": 2, "z": 2})
    RB = R1(B)
    xb, zb = RB.A1.var(0), RB.A1.var(1)
    assert set(alpha_p_elements(RB)) == {xb, zb, xb * zb}
    assert alpha_p_elements(R1(monomial_frame(3, 2, 2, {}))) == []


def test_mu_p_examples():
    R = R1(monomial_frame(2, 1, 4, {"x": 3}))
    x = R.A1.var(0)
    assert set(mu_p_elements(R)) == {R.A1.one, R.A1.one + x**2}
    assert mu_p_elements(R1(monomial_frame(2, 2, 2, {}))) == [R1(monomial_frame(2, 2, 2, {})).A1.one]


@pytest.mark.parametrize("shape", FRAME_SHAPES)
def test_alpha_p_dimension_matches_enumeration(shape):
    R = R1(monomial_frame(*shape))
    if R.size > 2**16:
        pytest.skip("ring too large to enumerate")
    brute = sum(1 for a in R.elements() if (a**R.p).is_zero())
    assert brute == R.field.q ** len(alpha_p_elements(R))
    rep = verify_mu_alpha_bijection(R)
    assert rep["checked"] and rep["ok"] and rep["mu_p"] == brute


def test_gamma_examples():
    A = monomial_frame(2, 1, 4, {"x": 3})
    R = R1(A)
    x = R.A1.var(0)
    assert gamma(A, x**2).is_zero()
    assert gamma(A, R.A1.zero).is_zero()
    B = monomial_frame(2, 1, 4, {"x": 2, "z": 2})
    RB = R1(B)
    xb, zb = RB.A1.var(0), RB.A1.var(1)
    assert gamma(B, xb + zb) == xb * zb
    assert gamma(B, xb * zb).is_zero()
    with pytest.raises(InvalidFrameError):
        gamma(A, x)


@pytest.mark.parametrize("shape", FRAME_SHAPES)
def test_gamma_is_lift_independent(shape):
    A = monomial_frame(*shape)
    R = R1(A)
    rng = random.Random(1)
    for a in _span(R, alpha_p_elements(R), 2**10):
        assert gamma(A, a, rng) == gamma(A, a, rng) == gamma(A, a)


def test_gamma_nilpotence_examples():
    B = monomial_frame(2, 1, 4, {"x": 2, "z": 2})
    rep = gamma_nilpotence(B)
    assert rep["nilpotent"] and rep["alpha_p_dim"] == 3
    assert gamma_nilpotence(monomial_frame(2, 1, 4, {"x": 3}))["nilpotent"]


@pytest.mark.parametrize("shape", FRAME_SHAPES)
def test_gamma_is_nilpotent_on_monomial_frames(shape):
    # γ raises the degree on every monomial frame, perturbed or not
    assert gamma_nilpotence(monomial_frame(*shape))["nilpotent"]


def test_divided_frobenius_examples():
    A = monomial_frame(2, 1, 4, {"x": 3})
    cot = divided_frobenius(A)
    x = cot.ring.A1.var(0)
    assert cot.matrix == [[x]]
    assert [[c.v for c in row] for row in cot.fiber] == [[0]] and cot.nilpotent_mod_m
    P = monomial_frame(2, 1, 4, {"x": 3}, {"x": {(1,): 1}})
    cot = divided_frobenius(P)
    xp = cot.ring.A1.var(0)
    assert cot.matrix == [[xp + 1]]
    assert [[c.v for c in row] for row in cot.fiber] == [[1]] and not cot.nilpotent_mod_m
    Z = divided_frobenius(monomial_frame(2, 2, 3, {}))
    assert Z.matrix == [] and Z.nilpotent_mod_m


def test_dejong_examples():
    rep = dejong_report(monomial_frame(2, 1, 4, {"x": 3}))
    assert rep["verdict"] and rep["condition1"] and rep["condition2"]
    assert rep["mu_alpha_bijection"]["ok"]
    rep = dejong_report(monomial_frame(2, 1, 4, {"x": 3}, {"x": {(1,): 1}}))
    assert rep["verdict"] is False and rep["condition1"] is False
    assert "statement" not in rep
    assert dejong_report(monomial_frame(3, 2, 2, {}))["verdict"]


def test_non_local_frame_is_rejected():
    A = MonomialFrame(2, 1, 3, ["x"], [None])
    with pytest.raises(NonLocalFrameError):
        dejong_report(A)


def test_artin_schreier_examples():
    R = R1(monomial_frame(2, 1, 2, {}))
    h0, h1 = artin_schreier_cohomology(R, "Z/p")
    assert h0 == [R.A1.one] and h1 == 1
    for f in (1, 2, 3):
        h0, h1 = artin_schreier_cohomology(R1(monomial_frame(2, f, 2, {})), "alpha_p")
        assert (h0, h1) == ([], 0)
    h0, h1 = artin_schreier_cohomology(R1(monomial_frame(2, 1, 2, {"x": 3})), "Z/p")
    assert (len(h0), h1) == (1, 1)


@pytest.mark.parametrize("f", [1, 2, 3])
def test_artin_schreier_over_fields(f):
    for p in (2, 3):
        h0, h1 = artin_schreier_cohomology(R1(monomial_frame(p, f, 2, {})), "Z/p")
        assert (len(h0), h1) == (1, 1)


@pytest.mark.parametrize("shape", FRAME_SHAPES)
def test_compatibility_square(shape):
    A = monomial_frame(*shape)
    if A.N < 3:
        A = A.with_precision(3)
    R = R1(A)
    for a in _span(R, alpha_p_elements(R), 2**10):
        out = compatibility_square(A, a)
        assert out["ok"], (shape, a)
        assert out["in_ker_d"]


@settings(max_examples=30)
@given(st.sampled_from([2, 3]), st.integers(1, 6), st.integers(0, 3))
def test_verdict_true_on_unperturbed_single_variable(p, e, extra):
    A = monomial_frame(p, 1, 3 + extra % 2, {"x": e})
    rep = dejong_report(A)
    assert rep["verdict"]
    assert rep["mu_alpha_bijection"]["ok"]
