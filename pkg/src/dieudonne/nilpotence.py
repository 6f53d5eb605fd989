"""Operators on the reduction R = A/pA of a monomial frame, and the two
nilpotence criteria (divided Frobenius on the cotangent module, γ on α_p).

Elements of R are Poly objects of the precision-1 variant of the frame.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import InvalidFrameError, NonLocalFrameError, PrecisionExhaustedError
from .fields import get_field
from .frames import MonomialFrame, Poly
from .linalg import kernel_field, kernel_mod_p, rank_mod_p
from .semilinear import SemilinearMap, stable_rank

ENUMERATION_CAP = 2**20
BIJECTION_CAP = 2**16


# ---------------------------------------------------------------------------
# the reduction ring

class ReductionRing:
    """R = A/pA = F_q[x]/(x_i^{e_i}) for a local monomial frame."""

    def __init__(self, frame: MonomialFrame):
        if not frame.is_local:
            raise NonLocalFrameError("the reduction ring of a non-local frame is infinite")
        self.frame = frame
        self.A1 = frame.with_precision(1)
        self.field = get_field(frame.p, frame.f)
        self.p, self.f = frame.p, frame.f
        self.basis = self.A1.monomials()
        self._index = {e: i for i, e in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return self.field.q ** self.dim

    def maximal_ideal_basis(self):
        return [e for e in self.basis if any(e)]

    def elem(self, x) -> Poly:
        if isinstance(x, Poly):
            return x.reduce(1) if x.frame.N != 1 else x.to_frame(self.A1)
        return self.A1.const(x)

    def to_vector(self, a: Poly):
        F = self.field
        v = [F.zero] * self.dim
        for e, c in a.terms.items():
            v[self._index[e]] = c.residue()
        return v

    def from_vector(self, v) -> Poly:
        R1 = self.A1.ring
        return Poly(self.A1, {e: R1.lift_residue(c) for e, c in zip(self.basis, v) if not c.is_zero()})

    def frobenius_power(self, a: Poly) -> Poly:
        return a ** self.p

    def elements(self):
        if self.size > ENUMERATION_CAP:
            raise ValueError(f"ring of size {self.size} exceeds the enumeration cap")
        for v in itertools.product(list(self.field.elements()), repeat=self.dim):
            yield self.from_vector(v)

    def is_in_maximal_ideal(self, a: Poly) -> bool:
        return a.constant_term().is_zero()


def reduction_ring(frame: MonomialFrame) -> ReductionRing:
    return ReductionRing(frame)


def _span(R: ReductionRing, basis, cap: int):
    count = R.field.q ** len(basis)
    if count > cap:
        raise ValueError(f"span of size {count} exceeds the enumeration cap")
    elems = list(R.field.elements())
    vecs = [R.to_vector(b) for b in basis]
    for coeffs in itertools.product(elems, repeat=len(basis)):
        acc = [R.field.zero] * R.dim
        for c, v in zip(coeffs, vecs):
            if not c.is_zero():
                acc = [a + c * b for a, b in zip(acc, v)]
        yield R.from_vector(acc)


# ---------------------------------------------------------------------------
# α_p and μ_p

def _power_matrix(R: ReductionRing):
    """Matrix (over F_q, twist 1) of f -> f^p on the monomial basis."""
    F = R.field
    M = [[F.zero] * R.dim for _ in range(R.dim)]
    for j, e in enumerate(R.basis):
        img = R.A1.monomial(e) ** R.p
        for i, c in enumerate(R.to_vector(img)):
            M[i][j] = c
    return M


def alpha_p_elements(R: ReductionRing):
    """F_q-basis of α_p(R) = {f : f^p = 0}."""
    if R.dim == 0:
        return []
    M = _power_matrix(R)
    # the kernel of M·φ is φ^{-1}(ker M); ker M is spanned by vectors over F_q
    ker = kernel_field(M, R.field, R.dim)
    out = []
    for v in ker:
        out.append(R.from_vector([c.frobenius(-1) for c in v]))
    return sorted(out, key=lambda a: sorted(a.terms))


def mu_p_elements(R: ReductionRing, cap: int = ENUMERATION_CAP):
    """{1 + g : g in α_p(R)}, listed by enumerating the F_q-span of α_p."""
    one = R.A1.one
    return [one + g for g in _span(R, alpha_p_elements(R), cap)]


def verify_mu_alpha_bijection(R: ReductionRing, cap: int = BIJECTION_CAP) -> dict:
    """Enumerate R and check that 1 + g <-> g identifies μ_p(R) with α_p(R)."""
    if R.size > cap:
        return {"checked": False, "reason": f"|R| = {R.size} exceeds {cap}"}
    one = R.A1.one
    alpha, mu = set(), set()
    for a in R.elements():
        a_p = a ** R.p
        if a_p.is_zero():
            alpha.add(a)
        if a_p == one:
            mu.add(a)
    image = {one + g for g in alpha}
    ok = image == mu and len(alpha) == len(mu)
    return {"checked": True, "ok": ok, "alpha_p": len(alpha), "mu_p": len(mu)}


# ---------------------------------------------------------------------------
# γ

def lift_to_frame(frame: MonomialFrame, a: Poly, rng: random.Random | None = None) -> Poly:
    """A lift of a in R to A; with rng, a random lift (adds p·noise)."""
    y = Poly(frame, {e: c.lift(frame.N) for e, c in a.terms.items()})
    if rng is not None and frame.N > 1:
        noise = frame.poly({e: frame.ring.random(rng) for e in frame.monomials()})
        y = y + noise * frame.p
    return y


def gamma(frame: MonomialFrame, a: Poly, rng: random.Random | None = None) -> Poly:
    """γ(a) = (y^p / p) mod p for a lift y of a in α_p(R)."""
    if frame.N < 2:
        raise PrecisionExhaustedError("γ needs frame precision at least 2")
    R1 = frame.with_precision(1)
    a = a.to_frame(R1) if a.frame.N == 1 else a.reduce(1)
    if not (a ** frame.p).is_zero():
        raise InvalidFrameError("γ is defined on α_p(R) only")
    y = lift_to_frame(frame, a, rng)
    u = (y ** frame.p).divide_exact_by_p(1)
    return u.reduce(1)


def gamma_nilpotence(frame: MonomialFrame) -> dict:
    """Iterate γ on a basis of α_p(R); nilpotent iff every orbit reaches 0
    within dim α_p + 1 steps."""
    R = ReductionRing(frame)
    basis = alpha_p_elements(R)
    bound = len(basis) + 1
    steps = []
    ok = True
    for b in basis:
        v, k = b, 0
        while not v.is_zero() and k <= bound:
            v = gamma(frame, v)
            k += 1
        steps.append(k)
        if not v.is_zero():
            ok = False
    return {"nilpotent": ok, "alpha_p_dim": len(basis), "orbit_lengths": steps}


# ---------------------------------------------------------------------------
# divided Frobenius on the cotangent module

@dataclass
class CotangentModule:
    """Free R-module on dx_1..dx_r with the divided Frobenius f_A.

    `matrix[i][j]` is the dx_i-coefficient of f_A(dx_j) (an element of R);
    `fiber` is the reduction modulo the maximal ideal, an F_q-matrix acting
    φ-semilinearly.
    """

    ring: ReductionRing
    matrix: list
    fiber: list
    nilpotent_mod_m: bool

    def apply(self, v):
        """f_A(Σ v_j dx_j) = Σ v_j^p f_A(dx_j)."""
        r = len(self.matrix)
        out = [self.ring.A1.zero] * r
        for j in range(r):
            c = v[j] ** self.ring.p
            for i in range(r):
                out[i] = out[i] + self.matrix[i][j] * c
        return out


def divided_frobenius(frame: MonomialFrame) -> CotangentModule:
    """Entries (1/p)·∂φ(x_j)/∂x_i reduced to R, computed by differentiating
    φ(x_j) in the untruncated frame."""
    R = ReductionRing(frame)
    U = frame.untruncated()
    r = frame.r
    M = [[None] * r for _ in range(r)]
    for j in range(r):
        phij = U.phi_x[j]
        for i in range(r):
            d = phij.derivative(i).divide_exact_by_p(1).reduce(1)
            M[i][j] = Poly(R.A1, d.terms)
    # cross-check against x_j^{p-1}·δ_ij + ∂h_j/∂x_i and p·f_A = dφ
    for j in range(r):
        for i in range(r):
            expect = frame.h[j].derivative(i)
            if i == j:
                expect = expect + frame.var(j) ** (frame.p - 1)
            if Poly(R.A1, expect.reduce(1).terms) != M[i][j]:
                raise InvalidFrameError("divided Frobenius does not match its closed form")  # pragma: no cover
    F = R.field
    fiber = [[M[i][j].constant_term().residue() for j in range(r)] for i in range(r)]
    nil = stable_rank(SemilinearMap(F, fiber, 1, r, r)) == 0 if r else True
    return CotangentModule(R, M, fiber, nil)


# ---------------------------------------------------------------------------
# the report

def dejong_report(frame: MonomialFrame) -> dict:
    if not frame.is_local:
        raise NonLocalFrameError("dejong_report needs every variable to be nilpotent")
    cot = divided_frobenius(frame)
    gam = gamma_nilpotence(frame)
    verdict = cot.nilpotent_mod_m and gam["nilpotent"]
    out = {
        "condition1": cot.nilpotent_mod_m,
        "condition2": gam["nilpotent"],
        "verdict": verdict,
        "divided_frobenius_fiber": [[c.v for c in row] for row in cot.fiber],
        "alpha_p_dim": gam["alpha_p_dim"],
        "gamma_orbit_lengths": gam["orbit_lengths"],
    }
    if verdict:
        out["statement"] = (
            "classification of truncated finite flat group schemes by windows over this frame is an exact equivalence"
        )
        out["mu_alpha_bijection"] = verify_mu_alpha_bijection(ReductionRing(frame))
    return out


# ---------------------------------------------------------------------------
# Artin–Schreier cohomology

def _fp_matrix(R: ReductionRing, op):
    """F_p-matrix of an additive map R -> R in the coordinates (monomial, coefficient)."""
    F = R.field
    cols = []
    for e in R.basis:
        for t in range(R.f):
            c = F.from_coeffs([1 if s == t else 0 for s in range(R.f)])
            a = R.from_vector([c if b == e else F.zero for b in R.basis])
            img = R.to_vector(op(a))
            cols.append([x for y in img for x in y.coeffs()])
    n = R.dim * R.f
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def artin_schreier_cohomology(R: ReductionRing, which: str):
    """(F_p-basis of H⁰, dim_{F_p} H¹) for α_p (f -> f^p) or Z/p (f -> f^p - f)."""
    if which in ("alpha_p", "alpha"):
        op = lambda a: a ** R.p
    elif which in ("Z/p", "Z"):
        op = lambda a: a ** R.p - a
    else:
        raise ValueError(f"unknown group {which!r}")
    if R.dim == 0:
        return [], 0
    M = _fp_matrix(R, op)
    n = len(M)
    ker = kernel_mod_p(M, R.p, n)
    F = R.field
    basis = []
    for v in ker:
        vec = [F.from_coeffs(v[k * R.f:(k + 1) * R.f]) for k in range(R.dim)]
        basis.append(R.from_vector(vec))
    return basis, n - rank_mod_p(M, R.p)


# ---------------------------------------------------------------------------
# the H^{-1} compatibility square

def _split_relation_part(U: MonomialFrame, frame: MonomialFrame, a: Poly):
    """a = p·u + k with k supported on the relation ideal; returns (u, k)."""
    k_terms, rest = {}, {}
    for e, c in a.terms.items():
        if frame.admissible(e):
            rest[e] = c
        else:
            k_terms[e] = c
    u = Poly(U, rest).divide_exact_by_p(1)
    return u, Poly(U, k_terms)


def h_minus1_class(frame: MonomialFrame, k: Poly):
    """Class of k in J/(J^2 + pJ), as coefficients (a_1..a_r) in R with
    k ≡ Σ a_i x_i^{e_i}.  Monomials lying in J^2 are dropped."""
    R1 = frame.with_precision(1)
    rel = frame.relation_exponents()
    idx = [i for i, e in enumerate(frame.truncs) if e is not None]
    coeffs = [{} for _ in idx]
    for e, c in k.terms.items():
        hits = [(t, g) for t, g in enumerate(rel) if all(x >= y for x, y in zip(e, g))]
        if not hits:
            raise InvalidFrameError("element is not in the relation ideal")
        if len(hits) > 1:
            continue
        t, g = hits[0]
        rest = tuple(x - y for x, y in zip(e, g))
        if not frame.admissible(rest):
            continue  # divisible by x_i^{2 e_i}: in J^2
        cr = c.reduce(1)
        if not cr.is_zero():
            coeffs[t][rest] = cr
    return [Poly(R1, cf) for cf in coeffs]


def alpha_to_h_minus1(frame: MonomialFrame, a: Poly):
    """L(a): lift a to the untruncated frame, write y^p = p·u + k with k
    in the relation ideal, and return the class of k."""
    U = frame.untruncated()
    y = Poly(U, {e: c.lift(frame.N) for e, c in a.terms.items()})
    _, k = _split_relation_part(U, frame, y ** frame.p)
    return h_minus1_class(frame, k), k


def divided_frobenius_h_minus1(frame: MonomialFrame):
    """Matrix of [k] -> [δ(k)] on J/J^2 ⊗ R in the basis x_i^{e_i} (twist 1)."""
    U = frame.untruncated()
    cols = []
    for g in frame.relation_exponents():
        cols.append(h_minus1_class(frame, U.monomial(g).delta()))
    t = len(cols)
    return [[cols[j][i] for j in range(t)] for i in range(t)]


def compatibility_square(frame: MonomialFrame, a: Poly) -> dict:
    """The three computations of the square for a in α_p(R):

    * lhs  = -L(γ(a)), with γ computed in the truncated frame,
    * mid  = [δ(k)] where y^p = p·u + k in the untruncated frame,
    * rhs  = f_A(L(a)) using the semilinear matrix of f_A on J/J^2.
    """
    if frame.N < 3:
        raise PrecisionExhaustedError("the square needs frame precision at least 3")
    g = gamma(frame, a)
    Lg, _ = alpha_to_h_minus1(frame, g)
    lhs = [-x for x in Lg]
    La, k = alpha_to_h_minus1(frame, a)
    mid = h_minus1_class(frame, k.delta())
    M = divided_frobenius_h_minus1(frame)
    p = frame.p
    rhs = []
    for i in range(len(M)):
        acc = frame.with_precision(1).zero
        for j in range(len(M)):
            acc = acc + M[i][j] * (La[j] ** p)
        rhs.append(acc)
    in_ker_d = _in_kernel_of_d(frame, k)
    return {"lhs": lhs, "mid": mid, "rhs": rhs, "L": La, "gamma": g, "in_ker_d": in_ker_d,
            "ok": lhs == mid == rhs and in_ker_d}


def _in_kernel_of_d(frame: MonomialFrame, k: Poly) -> bool:
    """d: J/J^2 -> Ω ⊗ R sends [k] to dk; L(a) must land in its kernel."""
    R1 = frame.with_precision(1)
    for i in range(frame.r):
        dk = Poly(R1, {e: c.reduce(1) for e, c in k.derivative(i).terms.items()})
        if not dk.is_zero():
            return False
    return True
