"""Dense matrix helpers over W(F_q)/p^N, F_q and Z/p^K.

Matrices are lists of rows.  The Smith normal form routines pick a pivot
of minimal valuation, breaking ties by row-major order, so that their
output (including the transformation matrices) is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatchError, NotInvertibleError, PrecisionInsufficientError
from .padic import PadicElem, WittRing, vp


# ---------------------------------------------------------------------------
# generic helpers (work for any element type with + - *)

def shape(M) -> tuple[int, int]:
    return (len(M), len(M[0]) if M else 0)


def zeros(ring, m: int, n: int):
    z = ring.zero
    return [[z] * n for _ in range(m)]


def identity(ring, n: int):
    M = zeros(ring, n, n)
    for i in range(n):
        M[i][i] = ring.one
    return M


def mat_mul(A, B, ring=None):
    if not A:
        return []
    n_inner = len(A[0])
    if n_inner != len(B):
        raise DimensionMismatchError(f"cannot multiply {shape(A)} by {shape(B)}")
    cols = len(B[0]) if B else 0
    if n_inner == 0:
        if ring is None:
            raise DimensionMismatchError("empty inner dimension needs an explicit ring")
        return zeros(ring, len(A), cols)
    out = []
    for row in A:
        new = []
        for j in range(cols):
            acc = row[0] * B[0][j]
            for k in range(1, n_inner):
                acc = acc + row[k] * B[k][j]
            new.append(acc)
        out.append(new)
    return out


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, c):
    return [[a * c for a in row] for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)] if A else []


def mat_map(A, fn):
    return [[fn(a) for a in row] for row in A]


def frob_matrix(A, s: int = 1):
    """Entrywise φ^s (negative s allowed)."""
    if s == 0:
        return [list(r) for r in A]
    if s < 0:
        out = A
        for _ in range(-s):
            out = mat_map(out, lambda a: a.frobenius_inverse() if isinstance(a, PadicElem) else a.frobenius(-1))
        return out
    return mat_map(A, lambda a: a.frobenius(s))


def mat_eq(A, B) -> bool:
    return shape(A) == shape(B) and all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def block_diag(ring, A, B):
    m1, n1 = shape(A)
    m2, n2 = shape(B)
    out = zeros(ring, m1 + m2, n1 + n2)
    for i in range(m1):
        for j in range(n1):
            out[i][j] = A[i][j]
    for i in range(m2):
        for j in range(n2):
            out[m1 + i][n1 + j] = B[i][j]
    return out


def hstack(A, B):
    return [list(ra) + list(rb) for ra, rb in zip(A, B)]


def reduce_matrix(A, M: int):
    return mat_map(A, lambda a: a.reduce(M))


def lift_matrix(A, M: int):
    return mat_map(A, lambda a: a.lift(M))


def min_valuation(A) -> int:
    vals = [a.valuation() for row in A for a in row]
    return min(vals) if vals else (A and A[0] and A[0][0].ring.N) or 0


# ---------------------------------------------------------------------------
# inverses over W/p^N

def mat_inverse(A):
    """Inverse of a square matrix over W/p^N with unit determinant."""
    n = len(A)
    if n == 0:
        return []
    ring = A[0][0].ring
    M = [list(r) + [ring.one if i == j else ring.zero for j in range(n)] for i, r in enumerate(A)]
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col].is_unit()), None)
        if piv is None:
            raise NotInvertibleError("matrix is not invertible over W")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        M[col] = [a * inv for a in M[col]]
        for i in range(n):
            if i != col and not M[i][col].is_zero():
                c = M[i][col]
                M[i] = [a - c * b for a, b in zip(M[i], M[col])]
    return [row[n:] for row in M]


def is_invertible(A) -> bool:
    try:
        mat_inverse(A)
    except NotInvertibleError:
        return False
    return True


# ---------------------------------------------------------------------------
# Smith normal form over W/p^N

@dataclass
class SmithForm:
    """U·A·V = S with S = diag(p^v_1, ..., p^v_k) padded by zeros.

    `vals` lists the pivot valuations (non-decreasing); entries equal to
    the working precision N mean that the pivot is zero mod p^N.
    Uinv, Vinv are the inverses of U, V.
    """

    U: list
    Uinv: list
    V: list
    Vinv: list
    vals: list
    N: int


def smith_form(A, ring: WittRing | None = None) -> SmithForm:
    m, n = shape(A)
    if ring is None:
        if m == 0 or n == 0:
            raise DimensionMismatchError("empty matrix needs an explicit ring")
        ring = A[0][0].ring
    N = ring.N
    S = [list(r) for r in A]
    U = identity(ring, m)
    Uinv = identity(ring, m)
    V = identity(ring, n)
    Vinv = identity(ring, n)
    vals = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = S[i][j].valuation()
                if best is None or v < best[0]:
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None or best[0] >= N:
            vals.extend([N] * (min(m, n) - t))
            break
        v, i, j = best
        if i != t:
            S[t], S[i] = S[i], S[t]
            U[t], U[i] = U[i], U[t]
            for row in Uinv:
                row[t], row[i] = row[i], row[t]
        if j != t:
            for row in S:
                row[t], row[j] = row[j], row[t]
            for row in V:
                row[t], row[j] = row[j], row[t]
            Vinv[t], Vinv[j] = Vinv[j], Vinv[t]
        unit = S[t][t].shift_down(v)
        uinv = unit.inverse()
        S[t] = [a * uinv for a in S[t]]
        U[t] = [a * uinv for a in U[t]]
        for row in Uinv:
            row[t] = row[t] * unit
        for i2 in range(t + 1, m):
            if not S[i2][t].is_zero():
                c = S[i2][t].shift_down(v)
                S[i2] = [a - c * b for a, b in zip(S[i2], S[t])]
                U[i2] = [a - c * b for a, b in zip(U[i2], U[t])]
                for row in Uinv:
                    row[t] = row[t] + c * row[i2]
        for j2 in range(t + 1, n):
            if not S[t][j2].is_zero():
                c = S[t][j2].shift_down(v)
                for row in S:
                    row[j2] = row[j2] - c * row[t]
                for row in V:
                    row[j2] = row[j2] - c * row[t]
                Vinv[t] = [a + c * b for a, b in zip(Vinv[t], Vinv[j2])]
        vals.append(v)
    return SmithForm(U, Uinv, V, Vinv, vals, N)


def elementary_divisors(A, ring: WittRing | None = None) -> list[int]:
    return smith_form(A, ring).vals


def certified_vals(A, ring: WittRing | None = None) -> list[int]:
    """Smith valuations, raising when a pivot cannot be certified nonzero."""
    sf = smith_form(A, ring)
    if any(v >= sf.N for v in sf.vals):
        raise PrecisionInsufficientError("a Smith pivot vanishes at the working precision")
    return sf.vals


def solve_dvr(A, b, ring: WittRing):
    """Some x with A·x = b over W/p^N, or None.  `b` is a column list.

    Uses the Smith form: U A V = S, so A x = b iff S y = U b with x = V y.
    Pivots that vanish modulo p^N are treated as zero.
    """
    m, n = len(A), (len(A[0]) if A else 0)
    sf = smith_form(A, ring) if m and n else None
    if sf is None:
        return [ring.zero] * n if all(x.is_zero() for x in b) else None
    Ub = [sum((u * x for u, x in zip(row, b)), ring.zero) for row in sf.U]
    y = [ring.zero] * n
    for i in range(m):
        v = sf.vals[i] if i < len(sf.vals) else ring.N
        if v >= ring.N:
            if not Ub[i].is_zero():
                return None
            continue
        if Ub[i].valuation() < v:
            return None
        y[i] = Ub[i].shift_down(v)
    return [sum((vv * yy for vv, yy in zip(row, y)), ring.zero) for row in sf.V]


# ---------------------------------------------------------------------------
# Smith normal form over Z/p^K with plain integers

def smith_vals_int(A: list[list[int]], p: int, K: int) -> list[int]:
    """Pivot valuations of the Smith form of an integer matrix modulo p^K."""
    m = len(A)
    n = len(A[0]) if m else 0
    mod = p**K
    S = [[x % mod for x in row] for row in A]
    vals = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = S[i]
            for j in range(t, n):
                x = row[j]
                if x:
                    v = vp(x, p, K)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            vals.extend([K] * (min(m, n) - t))
            break
        v, i, j = best
        S[t], S[i] = S[i], S[t]
        if j != t:
            for row in S:
                row[t], row[j] = row[j], row[t]
        pv = p**v
        unit = S[t][t] // pv
        uinv = pow(unit, -1, mod)
        S[t] = [(a * uinv) % mod for a in S[t]]
        pivrow = S[t]
        for i2 in range(t + 1, m):
            x = S[i2][t]
            if x:
                c = x // pv
                S[i2] = [(a - c * b) % mod for a, b in zip(S[i2], pivrow)]
        # the row elimination leaves column t clean below; the row of the
        # pivot is cleared implicitly since later pivots never use column t
        for j2 in range(t + 1, n):
            pivrow[j2] = 0
        vals.append(v)
    return vals


# ---------------------------------------------------------------------------
# Gaussian elimination over F_p with integers

def rref_mod_p(A: list[list[int]], p: int):
    """Reduced row echelon form; returns (R, pivot columns)."""
    M = [[x % p for x in row] for row in A]
    m = len(M)
    n = len(M[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [(x * inv) % p for x in M[r]]
        for i in range(m):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return M, pivots


def rank_mod_p(A, p: int) -> int:
    return len(rref_mod_p(A, p)[1])


def kernel_mod_p(A: list[list[int]], p: int, ncols: int | None = None) -> list[list[int]]:
    """Basis of {x : A x = 0} over F_p."""
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    R, piv = rref_mod_p(A, p)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for fc in free:
        x = [0] * n
        x[fc] = 1
        for r, pc in enumerate(piv):
            x[pc] = (-R[r][fc]) % p
        basis.append(x)
    return basis


def solve_mod_p(A: list[list[int]], b: list[int], p: int):
    """Solution of A x = b over F_p with free variables set to 0, or None."""
    m = len(A)
    n = len(A[0]) if m else 0
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref_mod_p(aug, p)
    if n in piv:
        return None
    x = [0] * n
    for r, pc in enumerate(piv):
        x[pc] = R[r][n]
    return x


# ---------------------------------------------------------------------------
# Gaussian elimination over F_q (FqElem entries)

def rref_field(A, field):
    M = [list(r) for r in A]
    m = len(M)
    n = len(M[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if not M[i][c].is_zero()), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(m):
            if i != r and not M[i][c].is_zero():
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return M, pivots


def rank_field(A, field) -> int:
    if not A or not A[0]:
        return 0
    return len(rref_field(A, field)[1])


def kernel_field(A, field, ncols: int | None = None):
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A:
        return [[field.one if i == j else field.zero for i in range(n)] for j in range(n)]
    R, piv = rref_field(A, field)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for fc in free:
        x = [field.zero] * n
        x[fc] = field.one
        for r, pc in enumerate(piv):
            x[pc] = -R[r][fc]
        basis.append(x)
    return basis


def column_space_field(A, field):
    """Basis (echelonised) of the span of the columns of A."""
    if not A or not A[0]:
        return []
    R, piv = rref_field(transpose(A), field)
    return [R[i] for i in range(len(piv))]
