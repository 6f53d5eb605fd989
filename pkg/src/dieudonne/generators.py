"""Random valid windows and exact sequences for property tests.

Every generator takes an explicit random.Random so that results are
reproducible from a seed.
"""

from __future__ import annotations

import random

from .isogeny import (
    compose,
    induced_map,
    kernel_presentation,
    random_isogeny,
)
from .linalg import frob_matrix, mat_inverse, mat_mul
from .padic import witt_ring
from .windows import (
    TorsionWindow,
    WindowMorphism,
    check_morphism,
    connected_etale,
    direct_sum,
    direct_sum_with_maps,
    standard,
)

SMALL_FIELDS = ((2, 1), (3, 1), (2, 2))  # q <= 4


def _standard_piece(p, f, rng, budget):
    options = [("Z/p^n", 1), ("mu_{p^n}", 1), ("alpha_p", 1), ("ss_pkernel", 2)]
    if budget >= 2:
        options += [("Z/p^n", 2), ("mu_{p^n}", 2)]
    options = [o for o in options if o[1] <= budget]
    name, size = rng.choice(options)
    if name in ("Z/p^n", "mu_{p^n}"):
        return standard(name, p, f, n=size)
    return standard(name, p, f)


def random_automorphism(ring, d, rng):
    """A random automorphism of ⊕W/p^{d_i}, as (U, U^{-1}) over `ring`.

    Built from unit diagonals and transvections whose entries respect the
    valuation bounds val(U_ij) >= d_i - d_j, so U and U^{-1} both stay
    well defined.
    """
    r = len(d)
    U = [[ring.random_unit(rng) if i == j else ring.zero for j in range(r)] for i in range(r)]
    for _ in range(2 * r):
        i, j = rng.randrange(r), rng.randrange(r)
        if i == j:
            continue
        c = ring.random(rng) * ring.p ** max(0, d[i] - d[j])
        E = [[ring.one if a == b else ring.zero for b in range(r)] for a in range(r)]
        E[i][j] = c
        U = mat_mul(E, U)
    return U, mat_inverse(U)


def transport(w: TorsionWindow, U, Uinv) -> tuple[TorsionWindow, WindowMorphism]:
    """The window obtained by the change of basis U, and U as an isomorphism."""
    R = witt_ring(w.p, w.f, w.N)
    up = lambda M: [[a.reduce(R.N) if a.ring.N >= R.N else a.lift_coeffs(R.N) for a in row] for row in M]
    U, Uinv = up(U), up(Uinv)
    F2 = mat_mul(mat_mul(U, w.F_rows()), frob_matrix(Uinv))
    V2 = mat_mul(mat_mul(frob_matrix(U), w.V_rows()), Uinv)
    w2 = TorsionWindow(w.p, w.f, w.divisors, F2, V2, w.N)
    return w2, WindowMorphism(w, w2, U)


def random_window(rng: random.Random, max_length: int = 4, fields=SMALL_FIELDS) -> TorsionWindow:
    """A random valid window of length <= max_length over a small field.

    Half of the time a direct sum of standard pieces, otherwise the kernel
    of a random isogeny; either way followed by a random change of basis.
    """
    p, f = rng.choice(fields)
    if rng.random() < 0.5:
        w = None
        budget = rng.randint(1, max_length)
        while budget > 0:
            piece = _standard_piece(p, f, rng, budget)
            budget -= piece.length()
            w = piece if w is None else direct_sum(w, piece)
            if rng.random() < 0.3:
                break
    else:
        while True:
            h = rng.randint(1, 2)
            n = rng.randint(1, 2)
            D = random_isogeny(p, f, 2 * n + 2, h, rng.randint(0, h), n, rng)
            w = kernel_presentation(D).window
            if 0 < w.length() <= max_length:
                break
    U, Uinv = random_automorphism(w.ring, w.divisors, rng)
    w2, iso = transport(w, U, Uinv)
    msg = check_morphism(iso)
    if msg:  # pragma: no cover - transport always yields a morphism
        raise AssertionError(msg)
    return w2


def random_exact_sequence(rng: random.Random, max_length: int = 4):
    """(kind, w1, w2, w3, alpha, beta) forming a short exact sequence.

    Three sources: split sequences of direct sums, connected–étale
    sequences, and the kernel sequence of a composite isogeny
    0 -> ker A1 -> ker(A2 A1) -> ker A2 -> 0.
    """
    kind = rng.choice(("sum", "connected-etale", "composite"))
    if kind == "sum":
        w1 = random_window(rng, max(1, max_length // 2))
        p, f = w1.p, w1.f
        w3 = random_window(rng, max_length - w1.length() or 1, fields=((p, f),))
        w2, inc1, _, _, pr2 = direct_sum_with_maps(w1, w3)
        return kind, w1, w2, w3, inc1, pr2
    if kind == "connected-etale":
        w = random_window(rng, max_length)
        ce = connected_etale(w)
        return kind, ce.w_conn, w, ce.w_et, ce.inclusion, ce.projection
    p, f = rng.choice(SMALL_FIELDS)
    h = rng.randint(1, 2)
    d = rng.randint(0, h)
    n1, n2 = rng.randint(1, 2), rng.randint(1, 2)
    N = 2 * (n1 + n2) + 2
    D1 = random_isogeny(p, f, N, h, d, n1, rng)
    D2 = random_isogeny(p, f, N, h, d, n2, rng, display_matrix=D1.mat("g_prime"))
    P1, P2, P3 = kernel_presentation(D1), kernel_presentation(compose(D2, D1)), kernel_presentation(D2)
    R = D1.ring
    I = [[R.one if i == j else R.zero for j in range(h)] for i in range(h)]
    alpha = WindowMorphism(P1.window, P2.window, induced_map(P1, P2, D2.mat("A0")))
    beta = WindowMorphism(P2.window, P3.window, induced_map(P2, P3, I))
    return kind, P1.window, P2.window, P3.window, alpha, beta
