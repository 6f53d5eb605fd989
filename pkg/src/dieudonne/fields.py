"""Finite fields F_q = F_p[x]/(P) with a fixed primitive defining polynomial.

Elements are stored as a single integer code: the coefficient vector
(c0, c1, ..., c_{f-1}) of the polynomial representative, packed base p.
For fields with at most 2**16 elements log/antilog tables are built on
first use, which makes multiplication and powering table lookups.
"""

from __future__ import annotations

import functools
import itertools

from .errors import FieldError

TABLE_LIMIT = 1 << 16

# Defining polynomials, low degree coefficient first, monic.  These are the
# Conway polynomials for the small cases; every entry is checked to be
# primitive by the test-suite, and pairs not listed fall back to the
# lexicographically first primitive polynomial (see `primitive_polynomial`).
DEFINING_POLYNOMIALS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
}


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_prime(n: int) -> bool:
    return n >= 2 and _prime_factors(n) == [n]


def _polymulmod(a: list[int], b: list[int], mod: tuple[int, ...], p: int) -> list[int]:
    f = len(mod) - 1
    prod = [0] * (2 * f - 1 if f else 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, f - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for i in range(f):
                prod[k - f + i] = (prod[k - f + i] - c * mod[i]) % p
    return (prod + [0] * f)[:f]


def _x_power(e: int, mod: tuple[int, ...], p: int) -> list[int]:
    f = len(mod) - 1
    result = [1] + [0] * (f - 1)
    base = ([0, 1] + [0] * f)[:f] if f > 1 else [(-mod[0]) % p]
    while e:
        if e & 1:
            result = _polymulmod(result, base, mod, p)
        base = _polymulmod(base, base, mod, p)
        e >>= 1
    return result


def is_primitive(poly: tuple[int, ...], p: int) -> bool:
    """True when `poly` is monic of degree f and x generates (F_p[x]/poly)^*.

    Multiplicative order p**f - 1 forces irreducibility: a reducible
    modulus gives a unit group whose exponent is strictly smaller.
    """
    f = len(poly) - 1
    if f < 1 or poly[-1] != 1 or poly[0] % p == 0:
        return False
    order = p**f - 1
    one = [1] + [0] * (f - 1)
    if _x_power(order, poly, p) != one:
        return False
    return all(_x_power(order // r, poly, p) != one for r in _prime_factors(order))


def primitive_polynomial(p: int, f: int) -> tuple[int, ...]:
    """Lexicographically first primitive monic polynomial of degree f."""
    for tail in itertools.product(range(p), repeat=f):
        poly = tuple(reversed(tail)) + (1,)
        if is_primitive(poly, p):
            return poly
    raise FieldError(f"no primitive polynomial of degree {f} over F_{p}")


def defining_polynomial(p: int, f: int) -> tuple[int, ...]:
    if (p, f) in DEFINING_POLYNOMIALS:
        return DEFINING_POLYNOMIALS[(p, f)]
    return _cached_search(p, f)


@functools.lru_cache(maxsize=None)
def _cached_search(p: int, f: int) -> tuple[int, ...]:
    return primitive_polynomial(p, f)


class FqField:
    """The field with q = p**f elements.  Use `get_field` to obtain instances."""

    def __init__(self, p: int, f: int):
        if not _is_prime(p):
            raise FieldError(f"p={p} is not prime")
        if f < 1:
            raise FieldError("degree must be positive")
        self.p = p
        self.f = f
        self.q = p**f
        self.modulus = defining_polynomial(p, f)
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        if self.q <= TABLE_LIMIT:
            self._build_tables()

    def __repr__(self):
        return f"GF({self.p}^{self.f})"

    def __reduce__(self):
        return (get_field, (self.p, self.f))

    # -- encoding helpers -------------------------------------------------
    def _encode(self, coeffs) -> int:
        v = 0
        for c in reversed(list(coeffs)):
            v = v * self.p + (c % self.p)
        return v

    def _decode(self, v: int) -> list[int]:
        out = []
        for _ in range(self.f):
            v, r = divmod(v, self.p)
            out.append(r)
        return out

    def _build_tables(self):
        q = self.q
        exp = [0] * (q - 1)
        log = [-1] * q
        p, f = self.p, self.f
        # multiplication by x acts on codes as a shift plus a reduction by
        # the modulus, so precompute the code of c * (x^f mod P) for each c
        red = [self._encode([(-c * m) % p for m in self.modulus[:f]]) for c in range(p)]
        top = p ** (f - 1)
        v = 1
        for i in range(q - 1):
            exp[i] = v
            log[v] = i
            hi, lo = divmod(v, top)
            v = self._add(lo * p, red[hi]) if f > 1 else (v * red[1]) % p
        self._exp = exp
        self._log = log

    # -- raw integer-code arithmetic ----------------------------------------
    def _add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.f == 1:
            return (a + b) % self.p
        out, mult, p = 0, 1, self.p
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * mult
            mult *= p
        return out

    def _neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.f == 1:
            return (-a) % self.p
        return self._encode([-c for c in self._decode(a)])

    def _mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._encode(_polymulmod(self._decode(a), self._decode(b), self.modulus, self.p))

    def _pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 0
        if self._log is not None:
            return self._exp[(self._log[a] * e) % (self.q - 1)]
        e %= self.q - 1
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            e >>= 1
        return result

    # -- public API -------------------------------------------------------
    def __call__(self, value) -> "FqElem":
        if isinstance(value, FqElem):
            if value.field is not self:
                raise FieldError("element belongs to another field")
            return value
        if isinstance(value, int):
            return FqElem(self, value % self.p)
        return self.from_coeffs(value)

    def from_coeffs(self, coeffs) -> "FqElem":
        coeffs = list(coeffs)
        if len(coeffs) > self.f:
            raise FieldError("too many coefficients")
        return FqElem(self, self._encode(coeffs))

    def from_code(self, code: int) -> "FqElem":
        if not 0 <= code < self.q:
            raise FieldError("code out of range")
        return FqElem(self, code)

    @property
    def zero(self) -> "FqElem":
        return FqElem(self, 0)

    @property
    def one(self) -> "FqElem":
        return FqElem(self, 1)

    @property
    def gen(self) -> "FqElem":
        """The class of x, a generator of the multiplicative group."""
        return FqElem(self, self._encode([0, 1]) if self.f > 1 else (-self.modulus[0]) % self.p)

    def elements(self):
        for v in range(self.q):
            yield FqElem(self, v)

    def log(self, a: "FqElem") -> int:
        """Discrete logarithm to the base `gen`."""
        if a.v == 0:
            raise FieldError("log of zero")
        if self._log is not None:
            return self._log[a.v]
        # baby-step giant-step for the large fields
        n = self.q - 1
        m = int(n**0.5) + 1
        table = {}
        cur = 1
        g = self.gen.v
        for j in range(m):
            table.setdefault(cur, j)
            cur = self._mul(cur, g)
        factor = self._pow(g, -m)
        gamma = a.v
        for i in range(m + 1):
            if gamma in table:
                return (i * m + table[gamma]) % n
            gamma = self._mul(gamma, factor)
        raise FieldError("discrete log failed")  # pragma: no cover


@functools.lru_cache(maxsize=None)
def get_field(p: int, f: int) -> FqField:
    return FqField(p, f)


class FqElem:
    """An element of a finite field; immutable and hashable."""

    __slots__ = ("field", "v")

    def __init__(self, field: FqField, v: int):
        self.field = field
        self.v = v

    def _coerce(self, other) -> int:
        if isinstance(other, FqElem):
            if other.field is not self.field:
                raise FieldError("mixing elements of different fields")
            return other.v
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FqElem(self.field, self.field._add(self.v, o))

    __radd__ = __add__

    def __neg__(self):
        return FqElem(self.field, self.field._neg(self.v))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FqElem(self.field, self.field._add(self.v, self.field._neg(o)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FqElem(self.field, self.field._mul(self.v, o))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return FqElem(self.field, self.field._pow(self.v, e))

    def inverse(self) -> "FqElem":
        if self.v == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self**-1

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * FqElem(self.field, o).inverse()

    def frobenius(self, k: int = 1) -> "FqElem":
        """x -> x^(p^k); negative k gives the inverse automorphism."""
        k %= self.field.f
        return self ** (self.field.p**k)

    def is_zero(self) -> bool:
        return self.v == 0

    def __bool__(self):
        return self.v != 0

    def coeffs(self) -> list[int]:
        return self.field._decode(self.v)

    def __eq__(self, other):
        if isinstance(other, FqElem):
            return self.field is other.field and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.field.p and (self.field.f >= 1)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.f, self.v))

    def __repr__(self):
        if self.field.f == 1:
            return f"{self.v}"
        return "F" + str(self.field.q) + "(" + "|".join(map(str, self.coeffs())) + ")"


@functools.lru_cache(maxsize=None)
def embedding_image(p: int, f: int, k: int) -> int:
    """Code of the image of gen(F_{p^f}) inside F_{p^{fk}}.

    The image is the first power gen_big^(j*(Q-1)/(q-1)) that is a root
    of the defining polynomial of the small field; this choice is
    deterministic and compatible with the Teichmüller embedding used by
    the Witt-vector rings.
    """
    small = get_field(p, f)
    big = get_field(p, f * k)
    if k == 1:
        return small.gen.v
    step = (big.q - 1) // (small.q - 1)
    g = big.gen**step
    cand = big.one
    for _ in range(small.q - 1):
        cand = cand * g
        acc = big.zero
        for c in reversed(small.modulus):
            acc = acc * cand + c
        if acc.is_zero():
            return cand.v
    raise FieldError("embedding not found")  # pragma: no cover


def embed(x: FqElem, big: FqField) -> FqElem:
    """Image of x under the fixed embedding F_q -> F_{q^k}."""
    small = x.field
    if big.p != small.p or big.f % small.f:
        raise FieldError("target is not an extension of the source field")
    if big is small:
        return x
    img = big.from_code(embedding_image(small.p, small.f, big.f // small.f))
    acc = big.zero
    for c in reversed(x.coeffs()):
        acc = acc * img + c
    return acc
