"""φ-semilinear matrix algebra over F_q and W(F_q)/p^N.

A `SemilinearMap` (M, s) acts by v -> M·φ^s(v).  Over a finite field,
kernels, images and fixed points are computed either directly (φ^s is a
bijection of F_q, so ker(M·φ^s) = φ^{-s}(ker M)) or, for the affine
problems, after restriction of scalars to F_p.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import DimensionMismatchError, PrecisionInsufficientError, RingMismatchError, UnsolvableError
from .fields import FqElem, FqField, embed, get_field
from .linalg import (
    column_space_field,
    frob_matrix,
    identity,
    kernel_field,
    kernel_mod_p,
    mat_mul,
    rank_field,
    rank_mod_p,
    smith_form,
    solve_mod_p,
    zeros,
)
from .padic import WittRing

DEFAULT_K_CAP = 16


def _frob_elem(a, s: int):
    if s == 0:
        return a
    if isinstance(a, FqElem):
        return a.frobenius(s)
    if s < 0:
        for _ in range(-s):
            a = a.frobenius_inverse()
        return a
    return a.frobenius(s)


@dataclass(frozen=True)
class SemilinearMap:
    ring: object
    matrix: tuple
    twist: int = 0
    source_dim: int = dc_field(default=-1)
    target_dim: int = dc_field(default=-1)

    def __post_init__(self):
        mat = tuple(tuple(r) for r in self.matrix)
        object.__setattr__(self, "matrix", mat)
        if self.target_dim < 0:
            object.__setattr__(self, "target_dim", len(mat))
        if self.source_dim < 0:
            object.__setattr__(self, "source_dim", len(mat[0]) if mat else 0)
        if len(mat) != self.target_dim or any(len(r) != self.source_dim for r in mat):
            raise DimensionMismatchError("matrix shape does not match the declared dimensions")

    @property
    def is_field(self) -> bool:
        return isinstance(self.ring, FqField)

    def rows(self):
        return [list(r) for r in self.matrix]

    def apply(self, v):
        if len(v) != self.source_dim:
            raise DimensionMismatchError("vector length mismatch")
        w = [_frob_elem(x, self.twist) for x in v]
        out = []
        for row in self.matrix:
            acc = self.ring.zero
            for a, x in zip(row, w):
                acc = acc + a * x
            out.append(acc)
        return out

    def __call__(self, v):
        return self.apply(v)


def from_rows(ring, rows, twist: int = 0, n: int | None = None) -> SemilinearMap:
    rows = [list(r) for r in rows]
    if n is None:
        n = len(rows[0]) if rows else 0
    return SemilinearMap(ring, rows, twist, n, len(rows))


def identity_map(ring, h: int, twist: int = 0) -> SemilinearMap:
    return SemilinearMap(ring, identity(ring, h), twist, h, h)


def compose(T1: SemilinearMap, T2: SemilinearMap) -> SemilinearMap:
    """(M1, s1)∘(M2, s2) = (M1·φ^{s1}(M2), s1 + s2)."""
    if T1.ring is not T2.ring:
        raise RingMismatchError("composition over different rings")
    if T1.source_dim != T2.target_dim:
        raise DimensionMismatchError("composition dimension mismatch")
    M2 = [[_frob_elem(a, T1.twist) for a in row] for row in T2.matrix]
    if T1.source_dim == 0:
        M = zeros(T1.ring, T1.target_dim, T2.source_dim)
    else:
        M = mat_mul([list(r) for r in T1.matrix], M2)
    return SemilinearMap(T1.ring, M, T1.twist + T2.twist, T2.source_dim, T1.target_dim)


def power(T: SemilinearMap, m: int) -> SemilinearMap:
    out = identity_map(T.ring, T.source_dim)
    for _ in range(m):
        out = compose(T, out)
    return out


def base_change(T: SemilinearMap, k: int) -> SemilinearMap:
    """The same map over F_{q^k} (entries embedded)."""
    if not T.is_field:
        raise RingMismatchError("base change implemented for field coefficients")
    F = T.ring
    big = get_field(F.p, F.f * k)
    M = [[embed(a, big) for a in row] for row in T.matrix]
    return SemilinearMap(big, M, T.twist, T.source_dim, T.target_dim)


# ---------------------------------------------------------------------------
# restriction of scalars to F_p

@dataclass(frozen=True)
class FpLinearization:
    """The F_p-matrix of a semilinear map over F_q; coordinate j*f + i is the
    i-th coefficient of the j-th entry of a vector."""

    p: int
    matrix: tuple
    source_dim: int
    target_dim: int

    def apply(self, x):
        return [sum(a * b for a, b in zip(row, x)) % self.p for row in self.matrix]


def vec_to_fp(v, field: FqField) -> list[int]:
    out = []
    for x in v:
        out.extend(x.coeffs())
    return out


def fp_to_vec(x, field: FqField):
    f = field.f
    return [field.from_coeffs(x[j * f:(j + 1) * f]) for j in range(len(x) // f)]


def linearize(T: SemilinearMap) -> FpLinearization:
    if not T.is_field:
        raise RingMismatchError("linearization is defined over finite fields")
    F = T.ring
    f = F.f
    cols = []
    for j in range(T.source_dim):
        for i in range(f):
            v = [F.zero] * T.source_dim
            v[j] = F.from_coeffs([1 if t == i else 0 for t in range(f)])
            cols.append(vec_to_fp(T.apply(v), F))
    n_out = T.target_dim * f
    rows = tuple(tuple(cols[c][r] for c in range(len(cols))) for r in range(n_out))
    return FpLinearization(F.p, rows, T.source_dim * f, n_out)


# ---------------------------------------------------------------------------
# ranks, Fitting decomposition

def rank(T: SemilinearMap) -> int:
    if not T.is_field:
        raise RingMismatchError("rank is computed over a field")
    if T.source_dim == 0 or T.target_dim == 0:
        return 0
    return rank_field(T.rows(), T.ring)


def stable_rank(T: SemilinearMap) -> int:
    """rank(T^h) where h is the dimension; ranks of powers stabilise by then."""
    if T.source_dim != T.target_dim:
        raise DimensionMismatchError("stable rank needs a square map")
    return rank(power(T, T.source_dim))


def is_nilpotent(T: SemilinearMap) -> bool:
    return stable_rank(T) == 0


def fitting_decomposition(T: SemilinearMap):
    """(basis of V_bij = im T^h, basis of V_nil = ker T^h)."""
    if T.source_dim != T.target_dim:
        raise DimensionMismatchError("Fitting decomposition needs a square map")
    h = T.source_dim
    F = T.ring
    if h == 0:
        return [], []
    P = power(T, h)
    bij = column_space_field(P.rows(), F)
    ker = kernel_field(P.rows(), F, h)
    nil = [[_frob_elem(x, -P.twist) for x in v] for v in ker]
    return bij, nil


# ---------------------------------------------------------------------------
# fixed points and the affine equation T(v) - v = b

def _affine_system(T: SemilinearMap, k: int):
    if T.twist != 1:
        raise ValueError("fixed points are computed for twist 1")
    if T.source_dim != T.target_dim:
        raise DimensionMismatchError("square map required")
    Tk = base_change(T, k)
    L = linearize(Tk)
    n = L.source_dim
    A = [[(L.matrix[i][j] - (1 if i == j else 0)) % T.ring.p for j in range(n)] for i in range(n)]
    return Tk, A


def fixed_points(T: SemilinearMap, k: int = 1):
    """F_p-basis of {v in F_{q^k}^h : T(v) = v}."""
    Tk, A = _affine_system(T, k)
    if not A:
        return []
    return [fp_to_vec(x, Tk.ring) for x in kernel_mod_p(A, T.ring.p)]


def solve_inhomogeneous(T: SemilinearMap, b, k: int = 1):
    """A solution v over F_{q^k} of T(v) - v = b.

    b may be given over F_q or over F_{q^k}.  Raises UnsolvableError when
    there is no solution at this degree (try a larger k).
    """
    Tk, A = _affine_system(T, k)
    big = Tk.ring
    bb = [x if x.field is big else embed(x, big) for x in b]
    if not A:
        return []
    x = solve_mod_p(A, vec_to_fp(bb, big), T.ring.p)
    if x is None:
        raise UnsolvableError(f"no solution over F_{big.q}")
    return fp_to_vec(x, big)


def solve_escalating(T: SemilinearMap, b, k_cap: int = DEFAULT_K_CAP):
    """Try k = 1, 2, 4, ... up to k_cap; returns (k, v)."""
    k = 1
    while k <= k_cap:
        try:
            return k, solve_inhomogeneous(T, b, k)
        except UnsolvableError:
            k *= 2
    raise UnsolvableError(f"no solution for extension degrees up to {k_cap}")


# ---------------------------------------------------------------------------
# kernel / cokernel sizes

def coker_ker_dims(T: SemilinearMap) -> tuple[int, int]:
    """(dim or length of kernel, dim or length of cokernel).

    Over F_q the dimensions (over F_q) come from Gaussian elimination on the
    F_p-linearization.  Over W/p^N the map is viewed as an approximation of
    a W-linear endomorphism and the lengths come from the Smith form; a
    pivot vanishing at precision N cannot be certified.
    """
    if T.is_field:
        f = T.ring.f
        if T.source_dim == 0 or T.target_dim == 0:
            return T.source_dim, T.target_dim
        r = rank_mod_p([list(row) for row in linearize(T).matrix], T.ring.p)
        return (T.source_dim * f - r) // f, (T.target_dim * f - r) // f
    if not isinstance(T.ring, WittRing):
        raise RingMismatchError("unsupported coefficient ring")
    if T.source_dim != T.target_dim:
        raise DimensionMismatchError("finite lengths need a square matrix over W")
    if T.source_dim == 0:
        return 0, 0
    vals = smith_form(T.rows(), T.ring).vals
    if any(v >= T.ring.N for v in vals):
        raise PrecisionInsufficientError("a Smith pivot vanishes at the working precision")
    total = sum(vals)
    return total, total
