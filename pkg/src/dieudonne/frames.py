"""Truncated monomial δ-frames A = (W(F_q)/p^N)[x_1..x_r]/(x_i^{e_i}).

The Frobenius lift is φ(x_i) = x_i^p + p·h_i for perturbation polynomials
h_i (default 0) and φ acts on coefficients by the Witt-vector Frobenius.
A truncation exponent of None means the variable is not truncated; such
frames are used for exact bookkeeping of the relation ideal.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import InvalidFrameError, NotDivisibleError, PrecisionExhaustedError
from .padic import PadicElem, witt_ring


class Poly:
    """An element of a MonomialFrame: a map exponent-vector -> coefficient.

    Zero coefficients are never stored and exponents always respect the
    frame's truncation.
    """

    __slots__ = ("frame", "terms")

    def __init__(self, frame: "MonomialFrame", terms=None):
        self.frame = frame
        clean = {}
        if terms:
            R = frame.ring
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != frame.r:
                    raise InvalidFrameError("exponent vector has the wrong length")
                if not frame.admissible(e):
                    continue
                if isinstance(c, int):
                    c = R(c)
                elif c.ring is not R:
                    raise InvalidFrameError("coefficient lives in a different ring")
                if not c.is_zero():
                    clean[e] = c
        self.terms = clean

    # -- basic protocol -----------------------------------------------------
    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(self.frame.names, e) if k
            )
            c = self.terms[e]
            parts.append(f"({c!r})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.frame.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.frame == other.frame and self.terms == other.terms

    def __hash__(self):
        return hash((self.frame.key, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, e) -> PadicElem:
        return self.terms.get(tuple(e), self.frame.ring.zero)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.frame != self.frame:
                raise InvalidFrameError("elements of different frames")
            return other
        return self.frame.const(other)

    # -- ring operations ----------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return Poly(self.frame, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.frame, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        fr = self.frame
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if not fr.admissible(e):
                    continue
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return Poly(fr, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = self.frame.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- Frobenius and friends ----------------------------------------------
    def frobenius(self) -> "Poly":
        fr = self.frame
        out = fr.zero
        for e, c in self.terms.items():
            term = fr.const(c.frobenius())
            for i, k in enumerate(e):
                if k:
                    term = term * fr.phi_power(i, k)
            out = out + term
        return out

    def divide_exact_by_p(self, k: int) -> "Poly":
        """b with p^k·b = self, at precision N - k."""
        fr = self.frame
        if k == 0:
            return self
        if k >= fr.N:
            raise PrecisionExhaustedError(f"cannot divide by p^{k} at precision {fr.N}")
        target = fr.with_precision(fr.N - k)
        out = {}
        for e, c in self.terms.items():
            if c.valuation() < k:
                raise NotDivisibleError("polynomial is not divisible by p^%d" % k)
            out[e] = c.shift_down(k).reduce(fr.N - k)
        return Poly(target, out)

    def delta(self) -> "Poly":
        fr = self.frame
        if fr.N == 1:
            raise PrecisionExhaustedError("delta needs precision at least 2")
        return (self.frobenius() - self ** fr.p).divide_exact_by_p(1)

    def reduce(self, M: int) -> "Poly":
        target = self.frame.with_precision(M)
        return Poly(target, {e: c.reduce(M) for e, c in self.terms.items()})

    def lift(self, M: int) -> "Poly":
        """Lift coefficients to precision M (zero digits appended)."""
        target = self.frame.with_precision(M)
        return Poly(target, {e: c.lift(M) for e, c in self.terms.items()})

    def to_frame(self, frame: "MonomialFrame") -> "Poly":
        """The same coefficients in another frame with the same variables
        (truncating or not as the target frame dictates)."""
        if frame.r != self.frame.r or frame.ring is not self.frame.ring:
            raise InvalidFrameError("incompatible frames")
        return Poly(frame, self.terms)

    def derivative(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                out[tuple(e2)] = c * k
        return Poly(self.frame, out)

    def valuation(self) -> int:
        return min((c.valuation() for c in self.terms.values()), default=self.frame.N)

    def constant_term(self) -> PadicElem:
        return self.coeff((0,) * self.frame.r)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def pairs(self):
        return sorted(self.terms.items())


class MonomialFrame:
    """(W(F_q)/p^N)[x]/(x_i^{e_i}) with φ(x_i) = x_i^p + p·h_i.

    `perturbations` maps a variable index (or name) to h_i, given as a dict
    {exponent tuple: int | PadicElem}.  Construction checks that φ and δ
    preserve the relation ideal; pass validate=False only for internal
    copies of already validated frames.
    """

    def __init__(self, p: int, f: int, N: int, names, truncs, perturbations=None, validate: bool = True):
        self.p, self.f, self.N = p, f, N
        self.names = tuple(names)
        self.truncs = tuple(None if e is None else int(e) for e in truncs)
        if len(self.names) != len(self.truncs):
            raise InvalidFrameError("one truncation exponent per variable")
        if any(e is not None and e < 1 for e in self.truncs):
            raise InvalidFrameError("truncation exponents must be positive")
        self.r = len(self.names)
        self.ring = witt_ring(p, f, N)
        raw = {}
        for key, spec in (perturbations or {}).items():
            i = self.names.index(key) if isinstance(key, str) else int(key)
            raw[i] = _normalize_terms(spec, self.r)
        self._raw_pert = raw
        self.key = (p, f, N, self.names, self.truncs, _freeze(raw))
        self._phi_cache: dict = {}
        self.h = tuple(Poly(self, raw.get(i, {})) for i in range(self.r))
        self.phi_x = tuple(
            self.var(i) ** p + self.h[i] * p for i in range(self.r)
        )
        if validate:
            self.validate()

    def __eq__(self, other):
        return isinstance(other, MonomialFrame) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        rel = ", ".join(f"{n}^{e}" for n, e in zip(self.names, self.truncs) if e is not None)
        return f"MonomialFrame({self.ring}[{','.join(self.names)}]/({rel}))"

    # -- construction helpers -------------------------------------------------
    def admissible(self, e) -> bool:
        return all(t is None or k < t for k, t in zip(e, self.truncs))

    def const(self, c) -> Poly:
        c = self.ring(c) if isinstance(c, int) else c
        if c.ring is not self.ring:
            c = c.reduce(self.N) if c.ring.N > self.N else c.lift(self.N)
        return Poly(self, {(0,) * self.r: c})

    @property
    def zero(self) -> Poly:
        return Poly(self, {})

    @property
    def one(self) -> Poly:
        return self.const(1)

    def var(self, i) -> Poly:
        if isinstance(i, str):
            i = self.names.index(i)
        e = [0] * self.r
        e[i] = 1
        return Poly(self, {tuple(e): self.ring.one})

    def monomial(self, e, c=1) -> Poly:
        return Poly(self, {tuple(e): c})

    def poly(self, terms) -> Poly:
        return Poly(self, _normalize_terms(terms, self.r))

    def phi_power(self, i: int, k: int) -> Poly:
        key = (i, k)
        if key not in self._phi_cache:
            self._phi_cache[key] = self.phi_x[i] ** k
        return self._phi_cache[key]

    def with_precision(self, M: int) -> "MonomialFrame":
        return _frame_variant(self.key, M, False)

    def untruncated(self) -> "MonomialFrame":
        return _frame_variant(self.key, self.N, True)

    # -- structure ------------------------------------------------------------
    @property
    def is_local(self) -> bool:
        return all(e is not None for e in self.truncs)

    def monomials(self):
        """Exponents of the monomial basis (local frames only)."""
        if not self.is_local:
            raise InvalidFrameError("monomial basis is infinite for an untruncated variable")
        return list(itertools.product(*[range(e) for e in self.truncs]))

    def relation_exponents(self):
        out = []
        for i, e in enumerate(self.truncs):
            if e is None:
                continue
            v = [0] * self.r
            v[i] = e
            out.append(tuple(v))
        return out

    def in_ideal(self, a: Poly) -> bool:
        """Whether a lies in the relation ideal (monomial membership)."""
        rel = self.relation_exponents()
        return all(any(all(x >= y for x, y in zip(e, g)) for g in rel) for e in a.terms)

    def validate(self):
        """Check that φ and δ map every relation into the relation ideal."""
        if not self.is_local and all(e is None for e in self.truncs):
            return
        U = self.untruncated()
        for i, e in enumerate(self.truncs):
            if e is None:
                continue
            xe = U.var(i) ** e
            phi = xe.frobenius()
            if not self.in_ideal(phi):
                raise InvalidFrameError(f"φ({self.names[i]}^{e}) is not in the relation ideal")
            if self.N >= 2:
                d = xe.delta()
                if not self.in_ideal(d):
                    raise InvalidFrameError(f"δ({self.names[i]}^{e}) is not in the relation ideal")

    def spec(self) -> dict:
        return {
            "p": self.p,
            "f": self.f,
            "N": self.N,
            "names": list(self.names),
            "truncs": list(self.truncs),
            "perturbations": {i: dict(t) for i, t in self._raw_pert.items()},
        }


def _normalize_terms(spec, r: int):
    if isinstance(spec, Poly):
        return dict(spec.terms)
    if isinstance(spec, dict):
        items = spec.items()
    else:
        items = spec
    out = {}
    for e, c in items:
        e = tuple(e)
        if len(e) != r:
            raise InvalidFrameError("exponent vector has the wrong length")
        out[e] = c
    return out


def _freeze(raw):
    def cf(c):
        return c if isinstance(c, int) else ("w", c.c)

    return tuple(sorted((i, tuple(sorted((e, cf(c)) for e, c in t.items()))) for i, t in raw.items()))


@lru_cache(maxsize=None)
def _frame_variant(key, M: int, untruncated: bool) -> MonomialFrame:
    p, f, _, names, truncs, frozen = key
    R = witt_ring(p, f, M)
    pert = {}
    for i, terms in frozen:
        t = {}
        for e, c in terms:
            if isinstance(c, tuple):
                c = R.from_coeffs(list(c[1]))
            t[e] = c
        pert[i] = t
    tr = (None,) * len(names) if untruncated else truncs
    return MonomialFrame(p, f, M, names, tr, pert, validate=False)


def monomial_frame(p: int, f: int, N: int, truncs: dict, perturbations=None) -> MonomialFrame:
    """Convenience constructor: truncs maps variable names to exponents."""
    names = list(truncs)
    return MonomialFrame(p, f, N, names, [truncs[n] for n in names], perturbations)
