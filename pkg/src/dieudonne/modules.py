"""Finite-length W(F_q)-modules X = ⊕ W/p^{d_i} and maps between them.

Maps are matrices over W (entries read modulo the row divisor).  Every
computation is done by lifting to a working precision K comfortably
above the largest divisor, so that all Smith pivots are certified.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotDivisibleError, PrecisionInsufficientError
from .linalg import smith_form, solve_dvr
from .padic import PadicElem, witt_ring


def working_precision(*divisor_lists) -> int:
    n = max((max(d) for d in divisor_lists if d), default=0)
    return 2 * n + 2


def lift_to(a: PadicElem, K: int) -> PadicElem:
    if a.ring.N == K:
        return a
    if a.ring.N > K:
        return a.reduce(K)
    return a.lift_coeffs(K)


def canon(a: PadicElem, d: int, ring) -> PadicElem:
    """Canonical representative of a mod p^d, as an element of `ring`."""
    m = ring.p**d
    return PadicElem(ring, tuple((c % m) % ring.pN for c in a.c))


def relations(ring, d):
    r = len(d)
    return [[ring(ring.p**d[i]) if i == j else ring.zero for j in range(r)] for i in range(r)]


def map_lengths(T, d_src, d_tgt, p: int, f: int) -> tuple[int, int, int]:
    """(length ker, length im, length coker) of T: ⊕W/p^{d_src} -> ⊕W/p^{d_tgt}."""
    len_src, len_tgt = sum(d_src), sum(d_tgt)
    if not d_tgt:
        return len_src, 0, 0
    if not d_src:
        return 0, 0, len_tgt
    K = working_precision(d_src, d_tgt)
    R = witt_ring(p, f, K)
    A = [[lift_to(T[i][j], K) for j in range(len(d_src))] + rel for i, rel in enumerate(relations(R, d_tgt))]
    vals = smith_form(A, R).vals
    if any(v >= K for v in vals):
        raise PrecisionInsufficientError("uncertified pivot")  # pragma: no cover
    coker = sum(vals)
    im = len_tgt - coker
    return len_src - im, im, coker


@dataclass
class Submodule:
    """A submodule S of X = ⊕W/p^{d}: S ≅ ⊕ W/p^{c_j} with basis columns `basis`.

    `basis` is an r×t matrix over the working ring; `_B_U` and `_U2` hold
    the data needed to compute coordinates.
    """

    ambient: tuple
    divisors: tuple
    basis: list
    ring: object
    _U: list
    _a: list
    _U2: list
    _keep: list

    def coords(self, x) -> list[PadicElem]:
        """Coordinates (mod p^{c_j}) of x in S; raises when x is not in S."""
        R = self.ring
        x = [lift_to(a, R.N) for a in x]
        Ux = [sum((u * a for u, a in zip(row, x)), R.zero) for row in self._U]
        z = []
        for val, ai in zip(Ux, self._a):
            if ai and val.valuation() < ai:
                raise NotDivisibleError("vector does not lie in the submodule")
            z.append(val.shift_down(ai) if ai else val)
        y = [sum((u * a for u, a in zip(row, z)), R.zero) for row in self._U2]
        out = [canon(y[idx], c, R) for idx, c in zip(self._keep, self.divisors)]
        # membership check: the reconstructed vector must agree with x
        rec = self.combine(out)
        for i, d in enumerate(self.ambient):
            if (rec[i] - x[i]).valuation() < d:
                raise NotDivisibleError("vector does not lie in the submodule")
        return out

    def combine(self, y):
        R = self.ring
        out = []
        for row in self.basis:
            acc = R.zero
            for e, a in zip(row, y):
                acc = acc + e * lift_to(a, R.N)
            out.append(acc)
        return out

    def length(self) -> int:
        return sum(self.divisors)


def submodule_from_generators(G, d, p: int, f: int, K: int | None = None) -> Submodule:
    """The submodule of ⊕W/p^{d} generated by the columns of G (r×s)."""
    r = len(d)
    s = len(G[0]) if G else 0
    if K is None:
        K = working_precision(d)
    R = witt_ring(p, f, K)
    if r == 0:
        return Submodule((), (), [], R, [], [], [], [])
    A = [[lift_to(G[i][j], K) for j in range(s)] + rel for i, rel in enumerate(relations(R, d))]
    sf = smith_form(A, R)
    a = sf.vals[:r]
    if any(v >= K for v in a):
        raise PrecisionInsufficientError("uncertified pivot")  # pragma: no cover
    # lattice L = G W^s + D W^r has basis B = Uinv diag(p^a); in these
    # coordinates the relations D W^r are spanned by C = Vinv[:r, s:]
    B = [[sf.Uinv[i][j] * (p ** a[j]) for j in range(r)] for i in range(r)]
    C = [[sf.Vinv[i][s + j] for j in range(r)] for i in range(r)]
    sf2 = smith_form(C, R)
    c = sf2.vals[:r]
    # basis of S: columns of B·U2inv, with orders p^{c_j}; drop trivial ones
    BU = [[sum((B[i][k] * sf2.Uinv[k][j] for k in range(r)), R.zero) for j in range(r)] for i in range(r)]
    keep = [j for j in range(r) if 0 < c[j] < K]
    keep.sort(key=lambda j: -c[j])
    divisors = tuple(c[j] for j in keep)
    basis = [[canon(BU[i][j], d[i], R) for j in keep] for i in range(r)]
    return Submodule(tuple(d), divisors, basis, R, sf.U, list(a), sf2.U, keep)


def kernel_generators(T, d_src, d_tgt, p: int, f: int, K: int | None = None):
    """Generators (columns) of ker(T: ⊕W/p^{d_src} -> ⊕W/p^{d_tgt})."""
    r1, r2 = len(d_src), len(d_tgt)
    if K is None:
        K = working_precision(d_src, d_tgt)
    R = witt_ring(p, f, K)
    if r1 == 0:
        return []
    if r2 == 0:
        return [[R.one if i == j else R.zero for j in range(r1)] for i in range(r1)]
    # x is in the kernel iff T x + D2 t = 0 for some t
    A = [[lift_to(T[i][j], K) for j in range(r1)] + rel for i, rel in enumerate(relations(R, d_tgt))]
    sf = smith_form(A, R)
    rank = sum(1 for v in sf.vals if v < K)
    cols = list(range(rank, r1 + r2))
    return [[sf.V[i][j] for j in cols] for i in range(r1)]


def kernel_submodule(T, d_src, d_tgt, p: int, f: int) -> Submodule:
    K = working_precision(d_src, d_tgt)
    gens = kernel_generators(T, d_src, d_tgt, p, f, K)
    return submodule_from_generators(gens, d_src, p, f, K)


def solve_modulo(A, b, d_tgt, p: int, f: int, K: int | None = None):
    """Some x with A x ≡ b modulo ⊕ p^{d_tgt}, or None."""
    r = len(d_tgt)
    s = len(A[0]) if A else 0
    if K is None:
        K = working_precision(d_tgt)
    R = witt_ring(p, f, K)
    M = [[lift_to(A[i][j], K) for j in range(s)] + rel for i, rel in enumerate(relations(R, d_tgt))]
    sol = solve_dvr(M, [lift_to(x, K) for x in b], R)
    if sol is None:
        return None
    return sol[:s]
