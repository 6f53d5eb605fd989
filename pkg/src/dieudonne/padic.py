"""Truncated unramified p-adic rings W(F_q)/p^N.

The ring is realised as (Z/p^N)[x]/(Q) where Q is the minimal polynomial
of the Teichmüller lift ζ of the generator of F_q^*.  With this choice
the Frobenius lift is the ring map x -> x^p, the Teichmüller lift of
gen^j is simply x^j, and reduction mod p is coefficient-wise reduction
into F_p[x]/(P) = F_q.  Teichmüller-digit vectors (the representation
used in files) are produced on demand by `PadicElem.digits`.
"""

from __future__ import annotations

import functools

from .errors import (
    NotDivisibleError,
    NotInvertibleError,
    PrecisionExhaustedError,
    RingMismatchError,
)
from .fields import FqElem, FqField, embed, get_field


def vp(n: int, p: int, cap: int) -> int:
    """p-adic valuation of an integer, capped (0 has valuation `cap`)."""
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


def _pmul(a, b, mod, m):
    """Product of coefficient lists a, b in (Z/m)[x]/(mod), mod monic."""
    f = len(mod) - 1
    if f == 1:
        return [(a[0] * b[0]) % m]
    prod = [0] * (2 * f - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for k in range(2 * f - 2, f - 1, -1):
        c = prod[k] % m
        if c:
            for i in range(f):
                prod[k - f + i] -= c * mod[i]
    return [c % m for c in prod[:f]]


def _ppow(a, e, mod, m):
    f = len(mod) - 1
    result = [1] + [0] * (f - 1)
    base = list(a)
    while e:
        if e & 1:
            result = _pmul(result, base, mod, m)
        base = _pmul(base, base, mod, m)
        e >>= 1
    return result


@functools.lru_cache(maxsize=None)
def teichmuller_modulus(p: int, f: int, N: int) -> tuple[int, ...]:
    """Minimal polynomial over Z/p^N of the Teichmüller lift of gen(F_q)."""
    P = get_field(p, f).modulus
    if f == 1:
        # the Teichmüller lift of the single root r of P; x - t
        m = p**N
        r = (-P[0]) % p
        t = r
        for _ in range(N):
            t = pow(t, p, m)
        return ((-t) % m, 1)
    m = p**N
    q = p**f
    zeta = [0, 1] + [0] * (f - 2)
    for _ in range(N):
        zeta = _ppow(zeta, q, P, m)
    # Q(X) = prod_i (X - zeta^{p^i}), coefficients computed inside R'
    conj = []
    cur = zeta
    for _ in range(f):
        conj.append(cur)
        cur = _ppow(cur, p, P, m)
    one = [1] + [0] * (f - 1)
    poly = [one]  # coefficients in R', low degree first
    for root in conj:
        new = [[0] * f for _ in range(len(poly) + 1)]
        for i, c in enumerate(poly):
            # multiply by X
            new[i + 1] = [(u + v) % m for u, v in zip(new[i + 1], c)]
            # multiply by -root
            rc = _pmul(c, root, P, m)
            new[i] = [(u - v) % m for u, v in zip(new[i], rc)]
        poly = new
    out = []
    for c in poly:
        if any(c[1:]):
            raise ArithmeticError("Teichmüller polynomial is not defined over Z_p")  # pragma: no cover
        out.append(c[0])
    return tuple(out)


class WittRing:
    """W(F_q)/p^N.  Obtain instances with `witt_ring(p, f, N)`."""

    def __init__(self, p: int, f: int, N: int):
        if N < 1:
            raise PrecisionExhaustedError("precision must be at least 1")
        self.p, self.f, self.N = p, f, N
        self.field: FqField = get_field(p, f)
        self.q = self.field.q
        self.pN = p**N
        self.modulus = teichmuller_modulus(p, f, N)
        basis_images = []
        for i in range(f):
            img = _ppow([0, 1] + [0] * (f - 2), i * p, self.modulus, self.pN) if f > 1 else [1]
            basis_images.append(img)
        self._frob = basis_images  # row i = coefficients of phi(x^i)
        inv = []
        for i in range(f):
            inv.append(
                _ppow([0, 1] + [0] * (f - 2), i * pow(p, f - 1), self.modulus, self.pN) if f > 1 else [1]
            )
        self._frob_inv = inv

    def __repr__(self):
        return f"W(F_{self.q})/{self.p}^{self.N}"

    def __reduce__(self):
        return (witt_ring, (self.p, self.f, self.N))

    def spec(self) -> tuple[int, int, int]:
        return (self.p, self.f, self.N)

    def __call__(self, value) -> "PadicElem":
        if isinstance(value, PadicElem):
            if value.ring is self:
                return value
            raise RingMismatchError(f"{value.ring} is not {self}")
        if isinstance(value, int):
            return PadicElem(self, (value % self.pN,) + (0,) * (self.f - 1))
        if isinstance(value, FqElem):
            return self.lift_residue(value)
        return self.from_coeffs(value)

    def from_coeffs(self, coeffs) -> "PadicElem":
        coeffs = [int(c) % self.pN for c in coeffs]
        if len(coeffs) > self.f:
            raise ValueError("too many coefficients")
        return PadicElem(self, tuple(coeffs + [0] * (self.f - len(coeffs))))

    @property
    def zero(self) -> "PadicElem":
        return PadicElem(self, (0,) * self.f)

    @property
    def one(self) -> "PadicElem":
        return self(1)

    @property
    def zeta(self) -> "PadicElem":
        """Teichmüller lift of the generator of F_q^*."""
        if self.f == 1:
            return PadicElem(self, ((-self.modulus[0]) % self.pN,))
        return PadicElem(self, (0, 1) + (0,) * (self.f - 2))

    def zeta_power(self, j: int) -> "PadicElem":
        j %= self.q - 1
        return self.zeta**j

    def lift_residue(self, x: FqElem) -> "PadicElem":
        """Naive lift: coefficient vector of x read as a vector in the ζ-basis."""
        if x.field is not self.field:
            raise RingMismatchError("residue field mismatch")
        if self.f == 1:
            return PadicElem(self, (x.v,))
        return PadicElem(self, tuple(x.coeffs()))

    def teichmuller_fast(self, x: FqElem) -> "PadicElem":
        if x.is_zero():
            return self.zero
        return self.zeta_power(self.field.log(x))

    def from_digits(self, digits) -> "PadicElem":
        if len(digits) > self.N:
            raise ValueError("too many digits")
        acc = self.zero
        pk = 1
        for d in digits:
            acc = acc + self.teichmuller_fast(d) * pk
            pk *= self.p
        return acc

    def random(self, rng) -> "PadicElem":
        return PadicElem(self, tuple(rng.randrange(self.pN) for _ in range(self.f)))

    def random_unit(self, rng) -> "PadicElem":
        while True:
            a = self.random(rng)
            if a.is_unit():
                return a


@functools.lru_cache(maxsize=None)
def witt_ring(p: int, f: int, N: int) -> WittRing:
    return WittRing(p, f, N)


class PadicElem:
    """Element of W(F_q)/p^N; immutable."""

    __slots__ = ("ring", "c")

    def __init__(self, ring: WittRing, c: tuple):
        self.ring = ring
        self.c = c

    # -- arithmetic -----------------------------------------------------
    def _other(self, other):
        if isinstance(other, PadicElem):
            if other.ring is not self.ring:
                raise RingMismatchError(f"{self.ring} vs {other.ring}")
            return other.c
        if isinstance(other, int):
            return (other % self.ring.pN,) + (0,) * (self.ring.f - 1)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        m = self.ring.pN
        return PadicElem(self.ring, tuple((a + b) % m for a, b in zip(self.c, o)))

    __radd__ = __add__

    def __neg__(self):
        m = self.ring.pN
        return PadicElem(self.ring, tuple((-a) % m for a in self.c))

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        m = self.ring.pN
        return PadicElem(self.ring, tuple((a - b) % m for a, b in zip(self.c, o)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            m = self.ring.pN
            return PadicElem(self.ring, tuple((a * other) % m for a in self.c))
        o = self._other(other)
        if o is None:
            return NotImplemented
        r = self.ring
        return PadicElem(r, tuple(_pmul(self.c, o, r.modulus, r.pN)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        r = self.ring
        return PadicElem(r, tuple(_ppow(self.c, e, r.modulus, r.pN)))

    def __eq__(self, other):
        o = self._other(other) if isinstance(other, (PadicElem, int)) else None
        if o is None:
            return NotImplemented
        return self.c == tuple(o)

    def __hash__(self):
        return hash((self.ring.spec(), self.c))

    def __repr__(self):
        if self.ring.f == 1:
            return f"{self.c[0]} mod {self.ring.p}^{self.ring.N}"
        return f"[{','.join(map(str, self.c))}] mod {self.ring.p}^{self.ring.N}"

    # -- structure --------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.c)

    def valuation(self) -> int:
        """min over coefficients; N for zero (the ζ-basis is a Z_p-basis)."""
        r = self.ring
        return min(vp(a, r.p, r.N) for a in self.c)

    def is_unit(self) -> bool:
        return any(a % self.ring.p for a in self.c)

    def residue(self) -> FqElem:
        F = self.ring.field
        return F.from_coeffs([a % self.ring.p for a in self.c])

    def inverse(self) -> "PadicElem":
        if not self.is_unit():
            raise NotInvertibleError(f"{self!r} is not a unit")
        r = self.ring
        x = r.lift_residue(self.residue().inverse())
        prec = 1
        while prec < r.N:
            x = x * (2 - self * x)
            prec *= 2
        return x

    def frobenius(self, k: int = 1) -> "PadicElem":
        r = self.ring
        if r.f == 1:
            return self
        k %= r.f
        out = self
        for _ in range(k):
            acc = [0] * r.f
            for ci, img in zip(out.c, r._frob):
                if ci:
                    for j in range(r.f):
                        acc[j] += ci * img[j]
            out = PadicElem(r, tuple(a % r.pN for a in acc))
        return out

    def frobenius_inverse(self) -> "PadicElem":
        r = self.ring
        if r.f == 1:
            return self
        acc = [0] * r.f
        for ci, img in zip(self.c, r._frob_inv):
            if ci:
                for j in range(r.f):
                    acc[j] += ci * img[j]
        return PadicElem(r, tuple(a % r.pN for a in acc))

    def reduce(self, M: int) -> "PadicElem":
        """Image in W/p^M for M <= N."""
        if M > self.ring.N:
            raise PrecisionExhaustedError(f"cannot reduce precision {self.ring.N} to {M}")
        r = witt_ring(self.ring.p, self.ring.f, M)
        return PadicElem(r, tuple(a % r.pN for a in self.c))

    def digits(self) -> list[FqElem]:
        """Teichmüller digits d_0..d_{N-1} with a = sum p^i [d_i]."""
        r = self.ring
        out = []
        cur = self
        for k in range(r.N):
            d = cur.residue()
            out.append(d)
            if k == r.N - 1:
                break
            cur = divide_exact_by_p(cur - cur.ring.teichmuller_fast(d), 1)
        return out

    def lift(self, M: int) -> "PadicElem":
        """Lift to W/p^M (M >= N) by appending zero Teichmüller digits."""
        if M < self.ring.N:
            raise ValueError("lift target precision is smaller than the current one")
        return witt_ring(self.ring.p, self.ring.f, M).from_digits(self.digits())

    def lift_coeffs(self, M: int) -> "PadicElem":
        """Lift to W/p^M by reading the ζ-coefficients as integers (a section too)."""
        return PadicElem(witt_ring(self.ring.p, self.ring.f, M), tuple(self.c))

    def shift_down(self, k: int) -> "PadicElem":
        """An element b of the same ring with p^k b = self; requires val >= k."""
        p = self.ring.p
        pk = p**k
        if any(a % pk for a in self.c):
            raise NotDivisibleError(f"{self!r} is not divisible by {p}^{k}")
        return PadicElem(self.ring, tuple(a // pk for a in self.c))


# -- module level operations --------------------------------------------------

def frobenius(a):
    """Frobenius lift on PadicElem or Poly."""
    return a.frobenius()


def teichmuller(x: FqElem, N: int) -> PadicElem:
    """Teichmüller lift by the Hensel-type iteration t <- t^q.

    Starting from any lift t_0 of x, t_k = t_0^(q^k) agrees with the
    Teichmüller lift modulo p^(k+1), so N-1 steps suffice.
    """
    F = x.field
    r = witt_ring(F.p, F.f, N)
    t = r.lift_residue(x)
    for _ in range(N - 1):
        t = t ** F.q
    return t


def divide_exact_by_p(a, k: int):
    """b with p^k b = a, at precision N - k (PadicElem or Poly)."""
    if hasattr(a, "divide_exact_by_p"):
        return a.divide_exact_by_p(k)
    r = a.ring
    if k == 0:
        return a
    if k > r.N:
        raise PrecisionExhaustedError(f"cannot divide by {r.p}^{k} at precision {r.N}")
    if a.valuation() < k:
        raise NotDivisibleError(f"{a!r} is not divisible by {r.p}^{k}")
    if k == r.N:
        raise PrecisionExhaustedError("division leaves no precision")
    pk = r.p**k
    target = witt_ring(r.p, r.f, r.N - k)
    return PadicElem(target, tuple((c // pk) % target.pN for c in a.c))


def delta(a):
    """δ(a) = (φ(a) - a^p)/p, exact at precision N - 1."""
    if hasattr(a, "delta") and not isinstance(a, PadicElem):
        return a.delta()
    r = a.ring
    if r.N == 1:
        raise PrecisionExhaustedError("delta needs precision at least 2")
    return divide_exact_by_p(a.frobenius() - a ** r.p, 1)


def verschiebung(a: PadicElem) -> PadicElem:
    """V(a) = p·φ^{-1}(a), returned in the same ring.

    In digit terms V shifts every digit one place up, so the top digit of
    a is shifted out and does not influence the result.
    """
    return a.frobenius_inverse() * a.ring.p


def verschiebung_power(a: PadicElem, k: int) -> PadicElem:
    for _ in range(k):
        a = verschiebung(a)
    return a


def embedding_exponent(p: int, f: int, k: int) -> int:
    """j such that the fixed embedding W(F_q) -> W(F_{q^k}) sends ζ to ζ_big^j."""
    small = get_field(p, f)
    big = get_field(p, f * k)
    return big.log(embed(small.gen, big))


def embed_padic(a: PadicElem, big: WittRing) -> PadicElem:
    """Image of a under the Teichmüller-compatible embedding W(F_q) -> W(F_{q^k})."""
    r = a.ring
    if big.p != r.p or big.f % r.f or big.N != r.N:
        raise RingMismatchError(f"cannot embed {r} into {big}")
    if big is r:
        return a
    z = big.zeta_power(embedding_exponent(r.p, r.f, big.f // r.f))
    acc = big.zero
    for c in reversed(a.c):
        acc = acc * z + c
    return acc
