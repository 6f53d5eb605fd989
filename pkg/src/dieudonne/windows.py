"""Torsion windows (N, F_N, V_N) over the p-adic frame (W(F_q), (p)).

Conventions (fixed by the point-count oracle in `cohomology`):

* N = ⊕ W/p^{d_i} with d_1 >= ... >= d_r, basis e_1..e_r.
* F_N : φ*N -> N has matrix F, i.e. it acts on N by v -> F·φ(v).
* V_N : N -> φ*N has matrix V (the twist by I' = (p) is trivialised by p).
* The axioms are F·V = p and V·F = p, row i read modulo p^{d_i}.
* Entry (i, j) of a map matrix must satisfy val >= d_i - d_j so that the
  map is well defined on the cyclic summands.

With these conventions Z/p^n is (W/p^n, F = p, V = 1) and μ_{p^n} is
(W/p^n, F = 1, V = p): the cohomology fib(V - φ) then reproduces the
F_{q^k}-points of the group scheme.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    DeterminantNotEPowerError,
    DimensionMismatchError,
    IdentityCheckFailedError,
    InvalidWindowError,
    NonMorphismError,
    PrecisionInsufficientError,
)
from .fields import get_field
from .linalg import frob_matrix, mat_mul, smith_vals_int
from .modules import (
    Submodule,
    canon,
    kernel_submodule,
    lift_to,
    map_lengths,
    working_precision,
    solve_modulo,
    submodule_from_generators,
)
from .padic import PadicElem, embed_padic, witt_ring
from .semilinear import SemilinearMap, stable_rank

STANDARD_NAMES = ("Z/p^n", "mu_{p^n}", "alpha_p", "ss_pkernel")


# ---------------------------------------------------------------------------
# the window type

def _canon_matrix(M, d_rows, ring):
    return tuple(tuple(canon(lift_to(a, ring.N), d_rows[i], ring) for a in row) for i, row in enumerate(M))


@dataclass(frozen=True)
class TorsionWindow:
    p: int
    f: int
    divisors: tuple
    F: tuple
    V: tuple
    N: int = 0

    def __post_init__(self):
        d = tuple(int(x) for x in self.divisors)
        object.__setattr__(self, "divisors", d)
        N = self.N or max(d, default=1)
        if N < max(d, default=1):
            raise InvalidWindowError("precision below the torsion exponent")
        object.__setattr__(self, "N", N)
        ring = witt_ring(self.p, self.f, N)
        r = len(d)
        for M in (self.F, self.V):
            if len(M) != r or any(len(row) != r for row in M):
                raise DimensionMismatchError("matrix size does not match the number of divisors")
        object.__setattr__(self, "F", _canon_matrix(self.F, d, ring))
        object.__setattr__(self, "V", _canon_matrix(self.V, d, ring))

    @property
    def ring(self):
        return witt_ring(self.p, self.f, self.N)

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def torsion(self) -> int:
        return max(self.divisors, default=0)

    def length(self) -> int:
        return sum(self.divisors)

    def F_rows(self):
        return [list(r) for r in self.F]

    def V_rows(self):
        return [list(r) for r in self.V]


def make_window(p, f, divisors, F, V, N: int = 0) -> TorsionWindow:
    """Build a window; integer entries are accepted."""
    ring = witt_ring(p, f, N or max(divisors, default=1))

    def conv(M):
        return [[ring(a) if isinstance(a, int) else a for a in row] for row in M]

    return TorsionWindow(p, f, tuple(divisors), conv(F), conv(V), N)


def zero_window(p, f, N: int = 1) -> TorsionWindow:
    return TorsionWindow(p, f, (), (), (), N)


# ---------------------------------------------------------------------------
# validation

@dataclass
class ValidationReport:
    ok: bool
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def first(self) -> str | None:
        return self.failures[0] if self.failures else None


def _well_defined(M, d_rows, d_cols) -> str | None:
    for i, row in enumerate(M):
        for j, a in enumerate(row):
            need = d_rows[i] - d_cols[j]
            if need > 0 and canon(a, d_rows[i], a.ring).valuation() < need:
                return f"entry ({i},{j}) has valuation {a.valuation()} < {need}"
    return None


def _eq_mod_rows(A, B, d_rows) -> tuple[int, int] | None:
    for i, (ra, rb) in enumerate(zip(A, B)):
        for j, (a, b) in enumerate(zip(ra, rb)):
            if (a - b).valuation() < d_rows[i]:
                return (i, j)
    return None


def validate(w: TorsionWindow) -> ValidationReport:
    fails = []
    d = w.divisors
    if any(x < 1 for x in d):
        fails.append("divisors must be positive")
    if list(d) != sorted(d, reverse=True):
        fails.append("divisors must be non-increasing")
    if w.torsion > w.N:
        fails.append("torsion exponent exceeds the precision")
    if fails:
        return ValidationReport(False, fails)
    for name, M in (("F", w.F), ("V", w.V)):
        msg = _well_defined(M, d, d)
        if msg:
            fails.append(f"{name} is not well defined: {msg}")
    if fails:
        return ValidationReport(False, fails)
    r = w.rank
    if r:
        ring = w.ring
        pI = [[ring(w.p) if i == j else ring.zero for j in range(r)] for i in range(r)]
        for label, prod in (("F∘V", mat_mul(w.F_rows(), w.V_rows())), ("V∘F", mat_mul(w.V_rows(), w.F_rows()))):
            bad = _eq_mod_rows(prod, pI, d)
            if bad:
                fails.append(f"{label} != p at entry {bad}")
    return ValidationReport(not fails, fails)


def require_valid(w: TorsionWindow) -> TorsionWindow:
    rep = validate(w)
    if not rep.ok:
        raise InvalidWindowError(rep.first())
    return w


# ---------------------------------------------------------------------------
# constructors

def standard(name: str, p: int, f: int = 1, n: int = 1) -> TorsionWindow:
    """Standard windows: "Z/p^n", "mu_{p^n}", "alpha_p", "ss_pkernel".

    The short names "Z/p", "mu_p" and "mu" are accepted as well.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    key = {"Z/p": "Z/p^n", "Z": "Z/p^n", "mu_p": "mu_{p^n}", "mu": "mu_{p^n}", "mu_{p}": "mu_{p^n}"}.get(name, name)
    if key == "Z/p^n":
        return make_window(p, f, (n,), [[p]], [[1]])
    if key == "mu_{p^n}":
        return make_window(p, f, (n,), [[1]], [[p]])
    if key == "alpha_p":
        return make_window(p, f, (1,), [[0]], [[0]])
    if key == "ss_pkernel":
        M = [[0, 0], [1, 0]]
        return make_window(p, f, (1, 1), M, M)
    raise ValueError(f"unknown standard window {name!r}")


# ---------------------------------------------------------------------------
# duality

def dual_matrix(M, d):
    """Matrix of the dual map in dual bases: D_ji = M_ij · p^{d_j - d_i}."""
    r = len(d)
    out = [[None] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            a = M[i][j]
            e = d[j] - d[i]
            out[j][i] = a * (a.ring.p**e) if e >= 0 else canon(a, d[i], a.ring).shift_down(-e)
    return out


def dual(w: TorsionWindow) -> TorsionWindow:
    """Cartier dual: N* = Hom(N, W[1/p]/W); F* = dual of V, V* = dual of F."""
    d = w.divisors
    if not d:
        return w
    return TorsionWindow(w.p, w.f, d, dual_matrix(w.V_rows(), d), dual_matrix(w.F_rows(), d), w.N)


# ---------------------------------------------------------------------------
# morphisms

@dataclass(frozen=True)
class WindowMorphism:
    source: TorsionWindow
    target: TorsionWindow
    matrix: tuple

    def __post_init__(self):
        ring = self.target.ring if self.target.rank else self.source.ring
        M = tuple(
            tuple(canon(lift_to(a, ring.N), self.target.divisors[i], ring) for a in row)
            for i, row in enumerate(self.matrix)
        )
        if len(M) != self.target.rank or any(len(r) != self.source.rank for r in M):
            raise DimensionMismatchError("morphism matrix has the wrong shape")
        object.__setattr__(self, "matrix", M)

    def rows(self):
        return [list(r) for r in self.matrix]


def check_morphism(m: WindowMorphism) -> str | None:
    """None when m is a window morphism, otherwise the first failure."""
    s, t = m.source, m.target
    if (s.p, s.f) != (t.p, t.f):
        return "source and target live over different rings"
    if s.rank == 0 or t.rank == 0:
        return None
    T = m.rows()
    msg = _well_defined(T, t.divisors, s.divisors)
    if msg:
        return f"module map is not well defined: {msg}"
    R = witt_ring(s.p, s.f, max(s.N, t.N))
    up = lambda M: [[lift_to(a, R.N) for a in row] for row in M]
    T, F1, V1, F2, V2 = up(T), up(s.F_rows()), up(s.V_rows()), up(t.F_rows()), up(t.V_rows())
    bad = _eq_mod_rows(mat_mul(T, F1), mat_mul(F2, frob_matrix(T)), t.divisors)
    if bad:
        return f"does not commute with F at entry {bad}"
    bad = _eq_mod_rows(mat_mul(frob_matrix(T), V1), mat_mul(V2, T), t.divisors)
    if bad:
        return f"does not commute with V at entry {bad}"
    return None


def morphism(source, target, matrix) -> WindowMorphism:
    m = WindowMorphism(source, target, matrix)
    msg = check_morphism(m)
    if msg:
        raise NonMorphismError(msg)
    return m


def lengths(m: WindowMorphism) -> tuple[int, int, int]:
    """(length ker, length im, length coker) of the underlying module map."""
    s, t = m.source, m.target
    return map_lengths(m.rows(), s.divisors, t.divisors, s.p, s.f)


def is_isomorphism(m: WindowMorphism) -> bool:
    if check_morphism(m) is not None:
        return False
    k, _, c = lengths(m)
    return k == 0 and c == 0


def compose_morphisms(m2: WindowMorphism, m1: WindowMorphism) -> WindowMorphism:
    s, t = m1.source, m2.target
    if s.rank == 0 or t.rank == 0 or m1.target.rank == 0:
        ring = (t if t.rank else s).ring
        return WindowMorphism(s, t, [[ring.zero] * s.rank for _ in range(t.rank)])
    R = witt_ring(s.p, s.f, max(s.N, m1.target.N, t.N))
    up = lambda M: [[lift_to(a, R.N) for a in row] for row in M]
    return WindowMorphism(s, t, mat_mul(up(m2.rows()), up(m1.rows())))


def identity_morphism(w: TorsionWindow) -> WindowMorphism:
    ring = w.ring
    return WindowMorphism(w, w, [[ring.one if i == j else ring.zero for j in range(w.rank)] for i in range(w.rank)])


def is_exact(w1, w2, w3, alpha: WindowMorphism, beta: WindowMorphism) -> bool:
    """Exactness of 0 -> w1 -> w2 -> w3 -> 0 (raises NonMorphismError)."""
    for m, (s, t) in ((alpha, (w1, w2)), (beta, (w2, w3))):
        if m.source != s or m.target != t:
            raise NonMorphismError("morphism endpoints do not match the sequence")
        msg = check_morphism(m)
        if msg:
            raise NonMorphismError(msg)
    comp = compose_morphisms(beta, alpha)
    if any(not a.is_zero() for row in comp.matrix for a in row):
        return False
    ka, ia, _ = lengths(alpha)
    kb, _, cb = lengths(beta)
    return ka == 0 and cb == 0 and kb == ia


# ---------------------------------------------------------------------------
# direct sums

def _permute(w_div, order):
    return tuple(w_div[i] for i in order)


def direct_sum_with_maps(w1: TorsionWindow, w2: TorsionWindow):
    """(w, inclusion1, inclusion2, projection1, projection2) with sorted divisors."""
    if (w1.p, w1.f) != (w2.p, w2.f):
        raise DimensionMismatchError("direct sum over different rings")
    N = max(w1.N, w2.N)
    R = witt_ring(w1.p, w1.f, N)
    d = w1.divisors + w2.divisors
    r1, r = w1.rank, len(d)
    order = sorted(range(r), key=lambda i: -d[i])

    def block(M1, M2):
        big = [[R.zero] * r for _ in range(r)]
        for i in range(r1):
            for j in range(r1):
                big[i][j] = lift_to(M1[i][j], N)
        for i in range(r - r1):
            for j in range(r - r1):
                big[r1 + i][r1 + j] = lift_to(M2[i][j], N)
        return [[big[order[k]][order[l]] for l in range(r)] for k in range(r)]

    w = TorsionWindow(w1.p, w1.f, _permute(d, order), block(w1.F_rows(), w2.F_rows()), block(w1.V_rows(), w2.V_rows()), N)
    one, zero = R.one, R.zero
    inc1 = [[one if order[k] == j else zero for j in range(r1)] for k in range(r)]
    inc2 = [[one if order[k] == r1 + j else zero for j in range(r - r1)] for k in range(r)]
    pr1 = [[one if order[k] == i else zero for k in range(r)] for i in range(r1)]
    pr2 = [[one if order[k] == r1 + i else zero for k in range(r)] for i in range(r - r1)]
    return (
        w,
        WindowMorphism(w1, w, inc1),
        WindowMorphism(w2, w, inc2),
        WindowMorphism(w, w1, pr1),
        WindowMorphism(w, w2, pr2),
    )


def direct_sum(w1: TorsionWindow, w2: TorsionWindow) -> TorsionWindow:
    return direct_sum_with_maps(w1, w2)[0]


# ---------------------------------------------------------------------------
# invariants

def fiber_operator(M, w: TorsionWindow, twist: int) -> SemilinearMap:
    """The operator induced on N/pN by a matrix M (entries reduced mod p)."""
    F = get_field(w.p, w.f)
    rows = [[a.residue() for a in row] for row in M]
    return SemilinearMap(F, rows, twist, w.rank, w.rank)


def etale_rank(w: TorsionWindow) -> int:
    """Stable rank of F_{N*} mod p."""
    if w.rank == 0:
        return 0
    return stable_rank(fiber_operator(dual(w).F_rows(), w, 1))


def is_nilpotent(w: TorsionWindow) -> bool:
    return etale_rank(w) == 0


def invariants(w: TorsionWindow) -> dict:
    """order exponent, Hodge numbers dim = length coker(V_N), codim =
    length coker(F_N), and the étale rank."""
    if w.rank == 0:
        return {"order_exponent": 0, "dim": 0, "codim": 0, "etale_rank": 0}
    d = w.divisors
    _, _, cV = map_lengths(w.V_rows(), d, d, w.p, w.f)
    _, _, cF = map_lengths(w.F_rows(), d, d, w.p, w.f)
    return {"order_exponent": w.length(), "dim": cV, "codim": cF, "etale_rank": etale_rank(w)}


# ---------------------------------------------------------------------------
# sub-windows and the connected–étale sequence

def restrict(w: TorsionWindow, sub: Submodule) -> TorsionWindow:
    """The window induced on an F- and V-stable submodule."""
    R = sub.ring
    t = len(sub.divisors)
    N = max(sub.divisors, default=1)
    if t == 0:
        return zero_window(w.p, w.f, N)
    up = lambda M: [[lift_to(a, R.N) for a in row] for row in M]
    F, V = up(w.F_rows()), up(w.V_rows())
    E = sub.basis
    cols = list(zip(*E))
    Fs, Vs = [], []
    for col in cols:
        vec = list(col)
        img = [sum((a * b.frobenius() for a, b in zip(row, vec)), R.zero) for row in F]
        Fs.append(sub.coords(img))
        img = [sum((a * b for a, b in zip(row, vec)), R.zero) for row in V]
        pre = sub.coords([x.frobenius_inverse() for x in img])
        Vs.append([y.frobenius() for y in pre])
    Fm = [[Fs[j][i] for j in range(t)] for i in range(t)]
    Vm = [[Vs[j][i] for j in range(t)] for i in range(t)]
    return TorsionWindow(w.p, w.f, sub.divisors, Fm, Vm, N)


def _v_power_matrix(w: TorsionWindow, m: int, R):
    """P_m with V_sl^m(v) = φ^{-m}(P_m v), P_m = φ^{m-1}(V)···φ(V)·V."""
    V = [[lift_to(a, R.N) for a in row] for row in w.V_rows()]
    P = V
    cur = V
    for _ in range(m - 1):
        cur = frob_matrix(cur)
        P = mat_mul(cur, P)
    return P


@dataclass
class ConnectedEtale:
    w_conn: TorsionWindow
    w_et: TorsionWindow
    inclusion: WindowMorphism
    projection: WindowMorphism
    splitting: WindowMorphism  # direct_sum(w_conn, w_et) -> w, an isomorphism


def connected_etale(w: TorsionWindow) -> ConnectedEtale:
    """0 -> w_conn -> w -> w_et -> 0 from the Fitting decomposition of V.

    V is bijective on N_bij = ∩ im V^m (the étale part, where F_{N*} is
    bijective) and nilpotent on N_nil = ∪ ker V^m (the connected part).
    Both pieces are F-stable because F·V = p.  Over a perfect field the
    sequence splits.
    """
    require_valid(w)
    p, f, d = w.p, w.f, w.divisors
    if w.rank == 0:
        z = zero_window(p, f)
        return ConnectedEtale(z, z, WindowMorphism(z, w, []), WindowMorphism(w, z, []), WindowMorphism(z, w, []))
    R = witt_ring(p, f, working_precision(d))
    m = max(w.length(), 1)
    P = _v_power_matrix(w, m, R)
    nil = kernel_submodule(P, d, d, p, f)
    gens = [[_frob_pow_inv(x, m) for x in row] for row in P]
    bij = submodule_from_generators(gens, d, p, f, R.N)
    w_conn = restrict(w, nil)
    w_et = restrict(w, bij)
    incl = WindowMorphism(w_conn, w, nil.basis) if w_conn.rank else WindowMorphism(w_conn, w, [[] for _ in d])
    # projection along N_nil: solve x = E_nil a + E_bij b modulo the relations
    t1, t2 = w_conn.rank, w_et.rank
    A = [list(rn) + list(rb) for rn, rb in zip(_cols(nil.basis, len(d), t1), _cols(bij.basis, len(d), t2))]
    proj_cols = []
    for i in range(len(d)):
        e = [R.one if k == i else R.zero for k in range(len(d))]
        sol = solve_modulo(A, e, d, p, f, R.N)
        if sol is None:
            raise IdentityCheckFailedError("Fitting pieces do not span the module")  # pragma: no cover
        proj_cols.append(sol[t1:])
    proj = WindowMorphism(w, w_et, [[proj_cols[i][j] for i in range(len(d))] for j in range(t2)])
    s, i1, i2, _, _ = direct_sum_with_maps(w_conn, w_et)
    # splitting matrix: columns of s correspond to basis vectors of w_conn / w_et
    both = [list(rn) + list(rb) for rn, rb in zip(_cols(nil.basis, len(d), t1), _cols(bij.basis, len(d), t2))]
    inc_rows = [list(r) for r in i1.matrix]
    inc2_rows = [list(r) for r in i2.matrix]
    # column k of the split iso is the image of the k-th basis vector of s
    split = [[None] * s.rank for _ in range(len(d))]
    for k in range(s.rank):
        src = None
        for j in range(t1):
            if not inc_rows[k][j].is_zero():
                src = j
        for j in range(t2):
            if not inc2_rows[k][j].is_zero():
                src = t1 + j
        for i in range(len(d)):
            split[i][k] = both[i][src]
    splitting = WindowMorphism(s, w, split)
    return ConnectedEtale(w_conn, w_et, incl, proj, splitting)


def _frob_pow_inv(x: PadicElem, m: int) -> PadicElem:
    for _ in range(m % x.ring.f):
        x = x.frobenius_inverse()
    return x


def _cols(basis, r, t):
    if t == 0:
        return [[] for _ in range(r)]
    return basis


# ---------------------------------------------------------------------------
# isomorphism search (small cases)

def find_isomorphism(w1: TorsionWindow, w2: TorsionWindow, limit: int = 200000) -> WindowMorphism | None:
    """Exhaustive search for an isomorphism w1 -> w2 (None if there is none).

    Raises ValueError when the search space exceeds `limit`.
    """
    if (w1.p, w1.f) != (w2.p, w2.f) or sorted(w1.divisors) != sorted(w2.divisors):
        return None
    if w1.rank == 0:
        return WindowMorphism(w1, w2, [])
    R = witt_ring(w1.p, w1.f, max(w1.N, w2.N))
    d1, d2 = w1.divisors, w2.divisors
    choices = []
    size = 1
    for i in range(w2.rank):
        for j in range(w1.rank):
            e = max(0, d2[i] - d1[j])
            free = d2[i] - e
            size *= R.q**free
            choices.append((e, free))
    if size > limit:
        raise ValueError(f"isomorphism search space {size} exceeds the limit {limit}")
    per_entry = []
    for e, free in choices:
        vals = []
        for code in range(R.q**free):
            coeffs, c = [], code
            for _ in range(R.f):
                c, r = divmod(c, R.p**free)
                coeffs.append(r * R.p**e)
            vals.append(R.from_coeffs(coeffs))
        per_entry.append(vals)
    r1 = w1.rank
    for combo in itertools.product(*per_entry):
        M = [list(combo[i * r1:(i + 1) * r1]) for i in range(w2.rank)]
        m = WindowMorphism(w1, w2, M)
        if is_isomorphism(m):
            return m
    return None


def windows_equal(w1: TorsionWindow, w2: TorsionWindow) -> bool:
    """Literal equality of the data (same basis)."""
    if (w1.p, w1.f, w1.divisors) != (w2.p, w2.f, w2.divisors):
        return False
    N = max(w1.N, w2.N)
    same = lambda A, B: all(
        lift_to(a, N) == lift_to(b, N) for ra, rb in zip(A, B) for a, b in zip(ra, rb)
    )
    return same(w1.F, w2.F) and same(w1.V, w2.V)


# ---------------------------------------------------------------------------
# cohomology

@dataclass(frozen=True)
class CohomologyResult:
    """H⁰ and H¹ of fib(V - φ) over F_{q^k} as lists of exponents e
    (the group is ⊕ Z/p^e).  `h1_dim` is log_p |H¹|, which is the
    F_p-dimension whenever H¹ is killed by p."""

    k: int
    h0: tuple
    h1: tuple

    @property
    def h0_order_exponent(self) -> int:
        return sum(self.h0)

    @property
    def h1_dim(self) -> int:
        return sum(self.h1)


def _linearized_T(w: TorsionWindow, k: int):
    """Integer matrix of v -> V v - φ(v) on ⊕ W(F_{q^k})/p^{d_i} over Z_p."""
    p, f, d = w.p, w.f, w.divisors
    n = w.torsion
    Fk = f * k
    big = witt_ring(p, Fk, n)
    V = [[embed_padic(a.reduce(n), big) for a in row] for row in w.V_rows()]
    zpow = [big.zeta_power(j) if Fk > 1 else big.one for j in range(Fk)]
    basis = [[1 if t == j else 0 for t in range(Fk)] for j in range(Fk)]
    basis_elems = [big.from_coeffs(b) for b in basis]
    r = len(d)
    size = r * Fk
    T = [[0] * size for _ in range(size)]
    for l in range(r):
        for j in range(Fk):
            col = l * Fk + j
            b = basis_elems[j]
            phib = b.frobenius()
            for i in range(r):
                val = V[i][l] * b
                if i == l:
                    val = val - phib
                m = p ** d[i]
                for t in range(Fk):
                    T[i * Fk + t][col] = val.c[t] % m
    coord_div = [d[i] for i in range(r) for _ in range(Fk)]
    return T, coord_div


def cohomology(w: TorsionWindow, k: int = 1) -> CohomologyResult:
    """fppf cohomology of the classified group scheme over F_{q^k} via
    fib(N -> φ*N, v -> V v - φ(v)) after restriction of scalars to Z_p.

    H¹ is the cokernel (Smith form of [T | relations]); H⁰ is the kernel,
    obtained as the cokernel of the Pontryagin-dual map.
    """
    require_valid(w)
    if w.rank == 0:
        return CohomologyResult(k, (), ())
    T, cd = _linearized_T(w, k)
    p = w.p
    K = w.torsion + 1
    size = len(cd)
    D = [[p ** cd[i] if i == j else 0 for j in range(size)] for i in range(size)]
    h1 = [v for v in smith_vals_int([row + drow for row, drow in zip(T, D)], p, K) if v > 0]
    Td = [[0] * size for _ in range(size)]
    for a in range(size):
        for b in range(size):
            x = T[a][b]
            e = cd[b] - cd[a]
            if e >= 0:
                Td[b][a] = x * p**e
            else:
                if x % p ** (-e):
                    raise InvalidWindowError("V is not well defined")  # pragma: no cover
                Td[b][a] = x // p ** (-e)
    h0 = [v for v in smith_vals_int([row + drow for row, drow in zip(Td, D)], p, K) if v > 0]
    if any(v >= K for v in h0 + h1):
        raise PrecisionInsufficientError("uncertified pivot")  # pragma: no cover
    return CohomologyResult(k, tuple(sorted(h0, reverse=True)), tuple(sorted(h1, reverse=True)))


# ---------------------------------------------------------------------------
# Breuil windows over the truncated frame (W/p^N)[u]/(u^M)

class SeriesRing:
    """(W(F_q)/p^N)[u]/(u^M); elements are tuples of M PadicElem coefficients."""

    def __init__(self, p: int, f: int, N: int, M: int):
        self.base = witt_ring(p, f, N)
        self.p, self.f, self.N, self.M = p, f, N, M

    def elem(self, coeffs):
        R = self.base
        cs = [R(c) if isinstance(c, int) else c for c in coeffs]
        if len(cs) > self.M:
            if any(not c.is_zero() for c in cs[self.M:]):
                cs = cs[: self.M]
            cs = cs[: self.M]
        return tuple(cs + [R.zero] * (self.M - len(cs)))

    @property
    def zero(self):
        return self.elem([])

    @property
    def one(self):
        return self.elem([1])

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def mul(self, a, b):
        R = self.base
        out = [R.zero] * self.M
        for i, x in enumerate(a):
            if x.is_zero():
                continue
            for j in range(self.M - i):
                y = b[j]
                if not y.is_zero():
                    out[i + j] = out[i + j] + x * y
        return tuple(out)

    def is_unit(self, a) -> bool:
        return a[0].is_unit()

    def inverse(self, a):
        R = self.base
        c0 = a[0].inverse()
        out = [R.zero] * self.M
        out[0] = c0
        for n in range(1, self.M):
            acc = R.zero
            for i in range(1, n + 1):
                acc = acc + a[i] * out[n - i]
            out[n] = -(acc * c0)
        return tuple(out)

    def is_zero(self, a) -> bool:
        return all(x.is_zero() for x in a)

    def divide_by_monic(self, a, E):
        """(quotient, remainder) of polynomial division of a by monic E."""
        e = max(i for i, c in enumerate(E) if not c.is_zero())
        rem = list(a)
        quo = [self.base.zero] * self.M
        for k in range(self.M - 1, e - 1, -1):
            c = rem[k]
            if c.is_zero():
                continue
            quo[k - e] = c
            for i in range(e + 1):
                rem[k - e + i] = rem[k - e + i] - c * E[i]
        return tuple(quo), tuple(rem)


@dataclass
class MixedCharWindow:
    p: int
    f: int
    N: int
    M: int
    E: tuple  # coefficients of the Eisenstein polynomial, low degree first
    F: list  # h×h matrix of series (tuples)

    @property
    def ring(self) -> SeriesRing:
        return SeriesRing(self.p, self.f, self.N, self.M)

    @property
    def h(self) -> int:
        return len(self.F)


def make_mixed_window(p, f, N, M, E, F) -> MixedCharWindow:
    S = SeriesRing(p, f, N, M)
    Ee = S.elem(E)
    Fm = [[S.elem(x if isinstance(x, (list, tuple)) else [x]) for x in row] for row in F]
    w = MixedCharWindow(p, f, N, M, Ee, Fm)
    _check_eisenstein(w)
    return w


def _check_eisenstein(w: MixedCharWindow):
    E = w.E
    nz = [i for i, c in enumerate(E) if not c.is_zero()]
    if not nz:
        raise DeterminantNotEPowerError("E must be nonzero")
    e = nz[-1]
    if e < 1 or E[e] != E[0].ring.one:
        raise DeterminantNotEPowerError("E must be monic of positive degree")
    if any(c.valuation() < 1 for c in E[:e]):
        raise DeterminantNotEPowerError("E must be Eisenstein (lower coefficients divisible by p)")
    if w.N >= 2 and E[0].valuation() != 1:
        raise DeterminantNotEPowerError("E must be Eisenstein (constant term of valuation 1)")


def _det(S: SeriesRing, M):
    n = len(M)
    if n == 0:
        return S.one
    if n == 1:
        return M[0][0]
    acc = S.zero
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = S.mul(M[0][j], _det(S, minor))
        acc = S.add(acc, term) if j % 2 == 0 else S.sub(acc, term)
    return acc


def _adjugate(S: SeriesRing, M):
    n = len(M)
    if n == 1:
        return [[S.one]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(M) if k != i]
            c = _det(S, minor)
            adj[j][i] = c if (i + j) % 2 == 0 else S.sub(S.zero, c)
    return adj


def _smat_mul(S, A, B):
    n, m, l = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(l):
            acc = S.zero
            for k in range(m):
                acc = S.add(acc, S.mul(A[i][k], B[k][j]))
            row.append(acc)
        out.append(row)
    return out


@dataclass
class VerschiebungResult:
    V: list
    d: int
    unit: tuple
    ok: bool


def recover_verschiebung(w: MixedCharWindow) -> VerschiebungResult:
    """V_N = E·F_N^{-1}, computed exactly in the truncated frame.

    det F_N = c·E^d with c a unit; then V = c^{-1}·adj(F_N)/E^{d-1} (or
    E·adj(F_N)·c^{-1} when d = 0).  Exact division by E is certified by
    the remainder of polynomial division, which is meaningful once
    u^M lies in (E, p^N), i.e. M >= e·N.
    """
    S = w.ring
    E = w.E
    e = max(i for i, c in enumerate(E) if not c.is_zero())
    if w.M < e * w.N:
        raise PrecisionInsufficientError(f"u-adic truncation {w.M} is below e·N = {e * w.N}")
    h = w.h
    det = _det(S, w.F)
    d = 0
    c = det
    while not S.is_unit(c):
        if d == h:
            raise DeterminantNotEPowerError("det F_N is not a unit times a power E^d with d <= h")
        q, r = S.divide_by_monic(c, E)
        if not S.is_zero(r):
            raise DeterminantNotEPowerError("det F_N is not a unit times a power of E")
        c, d = q, d + 1
    cinv = S.inverse(c)
    adj = _adjugate(S, w.F)
    if d == 0:
        V = [[S.mul(S.mul(E, a), cinv) for a in row] for row in adj]
    else:
        V = []
        for row in adj:
            new = []
            for a in row:
                for _ in range(d - 1):
                    a, r = S.divide_by_monic(a, E)
                    if not S.is_zero(r):
                        raise DeterminantNotEPowerError("coker F_N is not killed by E (not a Breuil window)")
                new.append(S.mul(a, cinv))
            V.append(new)
    EI = [[E if i == j else S.zero for j in range(h)] for i in range(h)]
    ok = _smat_mul(S, w.F, V) == EI and _smat_mul(S, V, w.F) == EI
    if not ok:
        raise IdentityCheckFailedError("F·V = V·F = E does not hold")
    return VerschiebungResult(V, d, c, ok)
