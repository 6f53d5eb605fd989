"""Banal displays and height-n isogeny data over W(F_q)/p^N.

A banal display of height h and Hodge index d is an invertible matrix g;
its window is W^h with F = J2·g and V = g^{-1}·J1, where

    J1 = diag(p·1_{h-d}, 1_d),   J2 = diag(1_{h-d}, p·1_d).

An isogeny datum (A0, A-1, B0, B-1, g, g') of height n satisfies

    A_i B_i = B_i A_i = p^n,
    A0 J2 = J2 A-1,  J1 A0 = A-1 J1   (and the same for B),
    A-1 g = g' φ(A0),  B-1 g' = g φ(B0).

A0 is then a window map from the display of g to the display of g', and
B0 goes back.  `canonical_lift` rebuilds an exact datum at high precision
from a truncated one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .errors import (
    DimensionMismatchError,
    HypothesisViolatedError,
    IdentityCheckFailedError,
    NotDivisibleError,
    NotInvertibleError,
    PrecisionBudgetExceededError,
    PrecisionInsufficientError,
)
from .linalg import (
    frob_matrix,
    identity,
    is_invertible,
    lift_matrix,
    mat_inverse,
    mat_mul,
    reduce_matrix,
    smith_form,
    transpose,
)
from .padic import divide_exact_by_p, witt_ring
from .windows import TorsionWindow

DEFAULT_EXTRA_LOSS = 4


# ---------------------------------------------------------------------------
# displays

def j_matrices(ring, h: int, d: int):
    """(J1, J2) for height h and Hodge index d."""
    if not 0 <= d <= h:
        raise DimensionMismatchError("Hodge index must satisfy 0 <= d <= h")
    p = ring.p
    J1 = [[ring.zero] * h for _ in range(h)]
    J2 = [[ring.zero] * h for _ in range(h)]
    for i in range(h):
        first = i < h - d
        J1[i][i] = ring(p if first else 1)
        J2[i][i] = ring(1 if first else p)
    return J1, J2


def conj_j2(M, d: int, inverse: bool = False):
    """J2·M·J2^{-1} (or J2^{-1}·M·J2), checking that no p is lost.

    Entry (i, j) gets multiplied by p^{[i in 2nd block] - [j in 2nd block]}
    (signs reversed for `inverse`); negative exponents divide exactly.
    """
    h = len(M)
    out = []
    for i in range(h):
        row = []
        for j in range(h):
            e = int(i >= h - d) - int(j >= h - d)
            if inverse:
                e = -e
            a = M[i][j]
            if e > 0:
                a = a * a.ring.p
            elif e < 0:
                if a.valuation() < 1:
                    raise NotDivisibleError(f"entry ({i},{j}) must be divisible by p")
                a = a.shift_down(1)
            row.append(a)
        out.append(row)
    return out


@dataclass(frozen=True)
class BanalDisplay:
    p: int
    f: int
    N: int
    h: int
    d: int
    g: tuple

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(tuple(r) for r in self.g))
        if len(self.g) != self.h or any(len(r) != self.h for r in self.g):
            raise DimensionMismatchError("g must be h×h")
        if not 0 <= self.d <= self.h:
            raise DimensionMismatchError("Hodge index must satisfy 0 <= d <= h")
        if not is_invertible(self.rows()):
            raise NotInvertibleError("structure matrix is not invertible")

    @property
    def ring(self):
        return witt_ring(self.p, self.f, self.N)

    def rows(self):
        return [list(r) for r in self.g]

    def J(self):
        return j_matrices(self.ring, self.h, self.d)

    def window(self, n: int | None = None) -> TorsionWindow:
        """The p^n-torsion window (W/p^n)^h with F = J2 g, V = g^{-1} J1."""
        n = self.N if n is None else n
        J1, J2 = self.J()
        g = self.rows()
        F = reduce_matrix(mat_mul(J2, g), n)
        V = reduce_matrix(mat_mul(mat_inverse(g), J1), n)
        return TorsionWindow(self.p, self.f, (n,) * self.h, F, V, n)


def display(p, f, N, h, d, g=None) -> BanalDisplay:
    R = witt_ring(p, f, N)
    if g is None:
        g = identity(R, h)
    g = [[R(a) if isinstance(a, int) else a for a in row] for row in g]
    return BanalDisplay(p, f, N, h, d, g)


def random_invertible(ring, h: int, rng: random.Random):
    while True:
        M = [[ring.random(rng) for _ in range(h)] for _ in range(h)]
        if is_invertible(M):
            return M


def random_display(p, f, N, h, d, rng) -> BanalDisplay:
    return BanalDisplay(p, f, N, h, d, random_invertible(witt_ring(p, f, N), h, rng))


def dual_display(D: BanalDisplay) -> BanalDisplay:
    """Display of the dual window: g^∨ = P^{-1} g^{-T} P and d^∨ = h - d,
    where P moves the last h - d basis vectors to the front."""
    perm = _block_swap(D.h, D.d)
    gt = transpose(mat_inverse(D.rows()))
    return BanalDisplay(D.p, D.f, D.N, D.h, D.h - D.d, _conj_perm(gt, perm))


def _block_swap(h: int, d: int):
    # new basis vector k is old basis vector perm[k]
    return list(range(h - d, h)) + list(range(h - d))


def _conj_perm(M, perm):
    return [[M[perm[i]][perm[j]] for j in range(len(perm))] for i in range(len(perm))]


# ---------------------------------------------------------------------------
# isogeny data

@dataclass(frozen=True)
class IsogenyDatum:
    p: int
    f: int
    N: int
    h: int
    d: int
    n: int
    g: tuple
    g_prime: tuple
    A0: tuple
    Am1: tuple
    B0: tuple
    Bm1: tuple

    def __post_init__(self):
        for name in ("g", "g_prime", "A0", "Am1", "B0", "Bm1"):
            M = tuple(tuple(r) for r in getattr(self, name))
            if len(M) != self.h or any(len(r) != self.h for r in M):
                raise DimensionMismatchError(f"{name} must be h×h")
            object.__setattr__(self, name, M)

    @property
    def ring(self):
        return witt_ring(self.p, self.f, self.N)

    def mat(self, name: str):
        return [list(r) for r in getattr(self, name)]

    def source(self) -> BanalDisplay:
        return BanalDisplay(self.p, self.f, self.N, self.h, self.d, self.g)

    def target(self) -> BanalDisplay:
        return BanalDisplay(self.p, self.f, self.N, self.h, self.d, self.g_prime)

    def truncate(self, M: int) -> "IsogenyDatum":
        if M > self.N:
            raise PrecisionInsufficientError("cannot truncate to a higher precision")
        kw = {k: reduce_matrix(self.mat(k), M) for k in MATRIX_FIELDS}
        return replace(self, N=M, **kw)


MATRIX_FIELDS = ("g", "g_prime", "A0", "Am1", "B0", "Bm1")


def make_datum(p, f, N, h, d, n, **mats) -> IsogenyDatum:
    R = witt_ring(p, f, N)
    conv = {k: [[R(a) if isinstance(a, int) else a for a in row] for row in mats[k]] for k in MATRIX_FIELDS}
    return IsogenyDatum(p, f, N, h, d, n, **conv)


@dataclass
class IsogenyReport:
    ok: bool
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def first(self):
        return self.failures[0] if self.failures else None


def _first_mismatch(X, Y):
    for i, (rx, ry) in enumerate(zip(X, Y)):
        for j, (a, b) in enumerate(zip(rx, ry)):
            if a != b:
                return i, j, a, b
    return None


def validate_isogeny(D: IsogenyDatum) -> IsogenyReport:
    """Check every defining identity at precision N; report the first failure."""
    R = D.ring
    fails = []
    for name in ("g", "g_prime"):
        if not is_invertible(D.mat(name)):
            fails.append(f"{name} is not invertible")
    if fails:
        return IsogenyReport(False, fails)
    J1, J2 = j_matrices(R, D.h, D.d)
    pn = [[R(D.p**D.n) if i == j else R.zero for j in range(D.h)] for i in range(D.h)]
    A0, Am1, B0, Bm1 = D.mat("A0"), D.mat("Am1"), D.mat("B0"), D.mat("Bm1")
    g, gp = D.mat("g"), D.mat("g_prime")
    checks = [
        ("A0·B0 = p^n", mat_mul(A0, B0), pn),
        ("B0·A0 = p^n", mat_mul(B0, A0), pn),
        ("A-1·B-1 = p^n", mat_mul(Am1, Bm1), pn),
        ("B-1·A-1 = p^n", mat_mul(Bm1, Am1), pn),
        ("A0·J2 = J2·A-1", mat_mul(A0, J2), mat_mul(J2, Am1)),
        ("J1·A0 = A-1·J1", mat_mul(J1, A0), mat_mul(Am1, J1)),
        ("B0·J2 = J2·B-1", mat_mul(B0, J2), mat_mul(J2, Bm1)),
        ("J1·B0 = B-1·J1", mat_mul(J1, B0), mat_mul(Bm1, J1)),
        ("A-1·g = g'·φ(A0)", mat_mul(Am1, g), mat_mul(gp, frob_matrix(A0))),
        ("B-1·g' = g·φ(B0)", mat_mul(Bm1, gp), mat_mul(g, frob_matrix(B0))),
    ]
    for label, X, Y in checks:
        bad = _first_mismatch(X, Y)
        if bad:
            i, j, a, b = bad
            fails.append(f"{label} fails at entry ({i},{j}): {a!r} != {b!r}")
    return IsogenyReport(not fails, fails)


def require_valid_isogeny(D: IsogenyDatum) -> IsogenyDatum:
    rep = validate_isogeny(D)
    if not rep.ok:
        raise HypothesisViolatedError(rep.first())
    return D


# ---------------------------------------------------------------------------
# exact corrections of approximate matrix identities

def _scalar(ring, h, c):
    return [[ring(c) if i == j else ring.zero for j in range(h)] for i in range(h)]


def correct_product(A, B, n: int, m: int):
    """(A, B') with A·B' = B'·A = p^n exactly and B' ≡ B mod p^{m-n}.

    Requires A·B ≡ p^n mod p^m with m >= n + 1.  With C = (AB/p^n - 1)/p^{m-n}
    the correction is B' = B·(1 + p^{m-n} C)^{-1}.  The computation runs with
    n guard digits so that both products are exact at the input precision.
    """
    R = A[0][0].ring
    N, p, h = R.N, R.p, len(A)
    if m < n + 1:
        raise HypothesisViolatedError("correct_product needs m >= n + 1")
    if m > N:
        raise PrecisionInsufficientError("working precision is below m")
    pn = _scalar(R, h, p**n)
    AB = mat_mul(A, B)
    if any((x - y).valuation() < m for rx, ry in zip(AB, pn) for x, y in zip(rx, ry)):
        raise HypothesisViolatedError("A·B is not congruent to p^n modulo p^m")
    if AB == pn and mat_mul(B, A) == pn:
        return [list(r) for r in A], [list(r) for r in B]
    G = witt_ring(p, R.f, N + n)
    Ag, Bg = lift_matrix(A, G.N), lift_matrix(B, G.N)
    ABg = mat_mul(Ag, Bg)
    X = [[divide_exact_by_p(a, n) for a in row] for row in ABg]  # precision N
    k = m - n
    C = [[divide_exact_by_p(x - (1 if i == j else 0), k) for j, x in enumerate(row)] for i, row in enumerate(X)]
    corr = [[(C[i][j].lift(G.N) * p**k) + (1 if i == j else 0) for j in range(h)] for i in range(h)]
    try:
        inv = mat_inverse(corr)
    except NotInvertibleError:  # pragma: no cover - impossible for m > n
        raise NotInvertibleError("1 + p^{m-n}C is not invertible")
    Bp = mat_mul(Bg, inv)
    Bp = reduce_matrix(Bp, N)
    if mat_mul(A, Bp) != pn or mat_mul(Bp, A) != pn:
        raise IdentityCheckFailedError("corrected pair is not exact")  # pragma: no cover
    return [list(r) for r in A], Bp


def exact_conjugator(A1, B1, A2, B2, n: int, m: int | None = None, approx=None):
    """The unique g̃ with g̃·A1 = A2 and B1·g̃^{-1} = B2, namely p^{-n}·A2·B1.

    The result has precision N - n.  If `approx` is given, the valuation
    of g̃ - approx is returned as well (reported, not enforced).
    """
    R = A1[0][0].ring
    P = mat_mul(A2, B1)
    try:
        gt = [[divide_exact_by_p(a, n) for a in row] for row in P]
    except NotDivisibleError:
        raise NotDivisibleError("A2·B1 is not divisible by p^n: no exact conjugator")
    M = R.N - n
    if M < 1:
        raise PrecisionInsufficientError("no precision left after dividing by p^n")
    if not is_invertible(gt):
        raise IdentityCheckFailedError("conjugator candidate is not invertible")
    A1r, B1r, A2r, B2r = (reduce_matrix(X, M) for X in (A1, B1, A2, B2))
    if mat_mul(gt, A1r) != A2r or mat_mul(B1r, mat_inverse(gt)) != B2r:
        raise IdentityCheckFailedError("(g̃A1, B1g̃^{-1}) != (A2, B2)")
    if approx is None:
        return gt
    diff = [a - b.reduce(M) if b.ring.N >= M else a.reduce(b.ring.N) - b for ra, rb in zip(gt, approx) for a, b in zip(ra, rb)]
    agree = min((x.valuation() for x in diff), default=M)
    return gt, agree


# ---------------------------------------------------------------------------
# canonical lifting

@dataclass
class LiftResult:
    datum: IsogenyDatum
    loss: int
    agreement: int
    budget: int


def agreement_valuation(D1: IsogenyDatum, D2: IsogenyDatum) -> int:
    """Largest v <= min precision with all six matrices congruent mod p^v."""
    M = min(D1.N, D2.N)
    v = M
    for name in MATRIX_FIELDS:
        X, Y = reduce_matrix(D1.mat(name), M), reduce_matrix(D2.mat(name), M)
        for rx, ry in zip(X, Y):
            for a, b in zip(rx, ry):
                v = min(v, (a - b).valuation())
    return v


def canonical_lift(D: IsogenyDatum, g_big, N_big: int, budget: int | None = None) -> LiftResult:
    """Exact datum at precision N_big lifting the truncated datum D.

    Steps: lift (A-1, B-1) by appending zero digits and correct the product;
    A0 = J2·A-1·J2^{-1} and B0 likewise; g' from the exact conjugator of
    (A-1·g, g^{-1}·B-1) and (φ(A0), φ(B0)); validate.  The work is done
    with n + 1 guard digits.  `loss` is N_small minus the agreement
    valuation with D; `budget` (default n + 4) bounds it.
    """
    p, f, h, d, n, Ns = D.p, D.f, D.h, D.d, D.n, D.N
    if budget is None:
        budget = n + DEFAULT_EXTRA_LOSS
    if Ns <= budget:
        raise PrecisionBudgetExceededError(
            f"input precision {Ns} does not exceed the loss budget {budget}"
        )
    if N_big < Ns:
        raise PrecisionInsufficientError("target precision below the input precision")
    require_valid_isogeny(D)
    g_big = [[witt_ring(p, f, N_big)(a) if isinstance(a, int) else a for a in row] for row in g_big]
    if g_big[0][0].ring.N != N_big:
        raise DimensionMismatchError("display matrix must be given at the target precision")
    if reduce_matrix(g_big, Ns) != D.mat("g"):
        raise HypothesisViolatedError("display matrix does not reduce to the datum's g")
    G = witt_ring(p, f, N_big + n + 1)
    # (i) lift and correct the (-1)-level pair
    Am1 = lift_matrix(D.mat("Am1"), G.N)
    Bm1 = lift_matrix(D.mat("Bm1"), G.N)
    Am1, Bm1 = correct_product(Am1, Bm1, n, Ns)
    # (ii) the 0-level pair; dividing the off-diagonal block by p costs the
    # top digit, so from here on the guard ring has precision N_big + n
    K = G.N - 1
    A0 = reduce_matrix(conj_j2(Am1, d), K)
    B0 = reduce_matrix(conj_j2(Bm1, d), K)
    Am1, Bm1 = reduce_matrix(Am1, K), reduce_matrix(Bm1, K)
    # (iii) the target display
    g = lift_matrix(g_big, K)
    ginv = mat_inverse(g)
    gpinv = exact_conjugator(mat_mul(Am1, g), mat_mul(ginv, Bm1), frob_matrix(A0), frob_matrix(B0), n)
    gp = mat_inverse(gpinv)
    out = IsogenyDatum(
        p, f, N_big, h, d, n,
        g_big,
        reduce_matrix(gp, N_big),
        reduce_matrix(A0, N_big),
        reduce_matrix(Am1, N_big),
        reduce_matrix(B0, N_big),
        reduce_matrix(Bm1, N_big),
    )
    # (iv) validate
    rep = validate_isogeny(out)
    if not rep.ok:
        raise IdentityCheckFailedError(rep.first())
    agree = agreement_valuation(out, D)
    loss = Ns - agree
    if loss > budget:
        raise PrecisionBudgetExceededError(f"measured loss {loss} exceeds the budget {budget}")
    return LiftResult(out, loss, agree, budget)


# ---------------------------------------------------------------------------
# kernels, composition, duality

def kernel_window(D: IsogenyDatum) -> TorsionWindow:
    """The window of ker(A): coker(A0) with the F and V of the target display."""
    return kernel_presentation(D).window


@dataclass
class KernelPresentation:
    """coker(A0) ≅ ⊕ W/p^{s_i}: the window together with the coordinate
    change.  `to_coords` (U) maps target-display coordinates to Smith
    coordinates, `basis` (U^{-1}) goes back; `keep` lists the Smith
    coordinates that survive, in window order."""

    window: TorsionWindow
    to_coords: list
    basis: list
    keep: list


def induced_map(P1: KernelPresentation, P2: KernelPresentation, T) -> list:
    """Matrix of coker1 -> coker2 induced by the W^h-map T."""
    M = mat_mul(mat_mul(P2.to_coords, T), P1.basis)
    return [[M[i][j] for j in P1.keep] for i in P2.keep]


def kernel_presentation(D: IsogenyDatum) -> KernelPresentation:
    R = D.ring
    if D.N < 2 * D.n + 1:
        raise PrecisionInsufficientError(f"kernel window needs precision >= 2n + 1 = {2 * D.n + 1}")
    A0 = D.mat("A0")
    sf = smith_form(A0, R)
    if any(v >= R.N for v in sf.vals):
        raise PrecisionInsufficientError("A0 is singular at this precision")
    J1, J2 = j_matrices(R, D.h, D.d)
    gp = D.mat("g_prime")
    F = mat_mul(J2, gp)
    V = mat_mul(mat_inverse(gp), J1)
    U, Uinv = sf.U, sf.Uinv  # U·A0·Vs = S, new basis vectors are the columns of U^{-1}
    Fn = mat_mul(mat_mul(U, F), frob_matrix(Uinv))
    Vn = mat_mul(mat_mul(frob_matrix(U), V), Uinv)
    keep = [i for i, v in enumerate(sf.vals) if v > 0]
    keep.sort(key=lambda i: -sf.vals[i])
    divs = tuple(sf.vals[i] for i in keep)
    if not divs:
        return KernelPresentation(TorsionWindow(D.p, D.f, (), (), (), 1), U, Uinv, keep)
    Nw = max(divs)
    sub = lambda M: [[M[i][j].reduce(Nw) for j in keep] for i in keep]
    return KernelPresentation(TorsionWindow(D.p, D.f, divs, sub(Fn), sub(Vn), Nw), U, Uinv, keep)


def compose(D2: IsogenyDatum, D1: IsogenyDatum) -> IsogenyDatum:
    """D2 ∘ D1 (D1's target must be D2's source)."""
    if (D1.p, D1.f, D1.h, D1.d) != (D2.p, D2.f, D2.h, D2.d):
        raise DimensionMismatchError("data live over different displays")
    N = min(D1.N, D2.N)
    r = lambda D, k: reduce_matrix(D.mat(k), N)
    if r(D1, "g_prime") != r(D2, "g"):
        raise HypothesisViolatedError("target of the first datum is not the source of the second")
    return IsogenyDatum(
        D1.p, D1.f, N, D1.h, D1.d, D1.n + D2.n,
        r(D1, "g"), r(D2, "g_prime"),
        mat_mul(r(D2, "A0"), r(D1, "A0")),
        mat_mul(r(D2, "Am1"), r(D1, "Am1")),
        mat_mul(r(D1, "B0"), r(D2, "B0")),
        mat_mul(r(D1, "Bm1"), r(D2, "Bm1")),
    )


def swap(D: IsogenyDatum) -> IsogenyDatum:
    """The datum (B, A) going back from g' to g."""
    return replace(D, g=D.g_prime, g_prime=D.g, A0=D.B0, Am1=D.Bm1, B0=D.A0, Bm1=D.Am1)


def dual_datum(D: IsogenyDatum) -> IsogenyDatum:
    """The transposed datum between the dual displays (source and target swap)."""
    perm = _block_swap(D.h, D.d)
    dv = D.h - D.d
    tr = lambda M: _conj_perm(transpose(M), perm)
    gd = lambda M: _conj_perm(transpose(mat_inverse(M)), perm)
    # J1·J2 = p is central, so the (-1)-level matrices transpose directly
    return IsogenyDatum(
        D.p, D.f, D.N, D.h, dv, D.n,
        gd(D.mat("g_prime")), gd(D.mat("g")),
        tr(D.mat("A0")), tr(D.mat("Am1")), tr(D.mat("B0")), tr(D.mat("Bm1")),
    )


# ---------------------------------------------------------------------------
# generators of exact data

def multiplication_by_p(Dsp: BanalDisplay, n: int = 1) -> IsogenyDatum:
    R = Dsp.ring
    h = Dsp.h
    pn, one = _scalar(R, h, Dsp.p**n), _scalar(R, h, 1)
    return IsogenyDatum(Dsp.p, Dsp.f, Dsp.N, h, Dsp.d, n, Dsp.g, Dsp.g, pn, pn, one, one)


def identity_datum(Dsp: BanalDisplay) -> IsogenyDatum:
    return multiplication_by_p(Dsp, 0)


def random_display_isomorphism(Dsp: BanalDisplay, rng) -> IsogenyDatum:
    """A random isomorphism γ out of the display (top-right block ≡ 0 mod p)."""
    R, h, d = Dsp.ring, Dsp.h, Dsp.d
    while True:
        gam = [[R.random(rng) for _ in range(h)] for _ in range(h)]
        for i in range(h - d):
            for j in range(h - d, h):
                gam[i][j] = gam[i][j] * Dsp.p
        if is_invertible(gam):
            break
    A0 = conj_j2(gam, d)
    gp = mat_mul(mat_mul(gam, Dsp.rows()), mat_inverse(frob_matrix(A0)))
    return IsogenyDatum(Dsp.p, Dsp.f, Dsp.N, h, d, 0, Dsp.g, gp, A0, gam, mat_inverse(A0), mat_inverse(gam))


def frobenius_isogeny(Dsp: BanalDisplay) -> IsogenyDatum:
    """The height-one isogeny whose source is Dsp, built as A0 = J2·t with
    target t = φ^{-1}(g).

    The name refers to the display matrices.  Its kernel window has length
    d and is étale when d = h, so for the group schemes it plays the role
    of the Verschiebung.
    """
    J1, J2 = Dsp.J()
    t = frob_matrix(Dsp.rows(), -1)
    A0 = mat_mul(J2, t)
    B0 = mat_mul(mat_inverse(t), J1)
    return IsogenyDatum(Dsp.p, Dsp.f, Dsp.N, Dsp.h, Dsp.d, 1, Dsp.g, t, A0, mat_mul(t, J2), B0, mat_mul(J1, mat_inverse(t)))


def verschiebung_isogeny(Dsp: BanalDisplay) -> IsogenyDatum:
    """The height-one isogeny from g to φ(g) given by A0 = g^{-1}·J1.

    Its kernel window has length h - d and is always connected.
    """
    J1, J2 = Dsp.J()
    g = Dsp.rows()
    gi = mat_inverse(g)
    A0 = mat_mul(gi, J1)
    Am1 = mat_mul(J1, gi)
    B0 = mat_mul(J2, g)
    Bm1 = mat_mul(g, J2)
    return IsogenyDatum(Dsp.p, Dsp.f, Dsp.N, Dsp.h, Dsp.d, 1, Dsp.g, frob_matrix(g), A0, Am1, B0, Bm1)


def random_isogeny(p, f, N, h, d, n, rng, display_matrix=None) -> IsogenyDatum:
    """A random exact datum of height n: isomorphisms interleaved with
    multiplication by p, Frobenius and Verschiebung isogenies."""
    R = witt_ring(p, f, N)
    g0 = display_matrix if display_matrix is not None else random_invertible(R, h, rng)
    D = random_display_isomorphism(BanalDisplay(p, f, N, h, d, g0), rng)
    for _ in range(n):
        tgt = D.target()
        step = rng.choice(("p", "F", "V"))
        if step == "p":
            S = multiplication_by_p(tgt)
        elif step == "F":
            S = frobenius_isogeny(tgt)
        else:
            S = verschiebung_isogeny(tgt)
        D = compose(S, D)
        D = compose(random_display_isomorphism(D.target(), rng), D)
    return D


# ---------------------------------------------------------------------------
# empirical precision loss

def lift_roundtrip(D: IsogenyDatum, N_small: int, budget: int | None = None) -> LiftResult:
    """Truncate an exact datum to N_small and lift it back to its precision."""
    return canonical_lift(D.truncate(N_small), D.mat("g"), D.N, budget)


def empirical_loss_search(h: int, n: int, p: int, f: int, seeds, N_small: int = 10, N_big: int = 14) -> dict:
    """Largest observed loss over the given seeds for one (h, n, q)."""
    worst = 0
    per_seed = []
    for seed in seeds:
        rng = random.Random(f"{p}-{f}-{h}-{n}-{seed}")
        d = rng.randint(0, h)
        D = random_isogeny(p, f, N_big, h, d, n, rng)
        res = lift_roundtrip(D, N_small, budget=N_small - 1)
        per_seed.append(res.loss)
        worst = max(worst, res.loss)
    return {"h": h, "n": n, "q": p**f, "max_loss": worst, "losses": per_seed}
