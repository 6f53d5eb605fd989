"""The acceptance suite, shared by `dieudonne selftest` and the test-suite.

Each criterion is a function (seed, level) -> CriterionResult.  Results
hold only deterministic data (counts, failure messages, observed maxima),
never timings, so that reports are byte-identical across runs.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field

from .errors import DieudonneError
from .fields import get_field
from .fixtures import check_fixture, fixture_paths
from .frames import monomial_frame
from .generators import random_exact_sequence, random_window
from .isogeny import (
    compose,
    correct_product,
    display,
    exact_conjugator,
    kernel_window,
    lift_roundtrip,
    multiplication_by_p,
    random_invertible,
    random_isogeny,
    validate_isogeny,
    MATRIX_FIELDS,
)
from .linalg import mat_inverse, mat_mul, rank_field, reduce_matrix
from .nilpotence import (
    ReductionRing,
    _span,
    alpha_p_elements,
    compatibility_square,
    dejong_report,
)
from .padic import delta, verschiebung, verschiebung_power, witt_ring
from .serialize import frame_from_json, load
from .windows import (
    WindowMorphism,
    cohomology,
    connected_etale,
    dual,
    etale_rank,
    find_isomorphism,
    invariants,
    is_exact,
    is_isomorphism,
    is_nilpotent,
    standard,
    validate,
)

MAX_REPORTED_FAILURES = 20

LEVELS = {
    "quick": {
        "witt_trials": 200,
        "windows": 100,
        "sequences": 40,
        "field_cap": 2**10,
        "lift_seeds": 4,
        "kernel_pairs": 20,
        "ce_windows": 60,
    },
    "full": {
        "witt_trials": 1000,
        "windows": 500,
        "sequences": 200,
        "field_cap": 2**16,
        "lift_seeds": 50,
        "kernel_pairs": 100,
        "ce_windows": 300,
    },
}


@dataclass
class CriterionResult:
    number: int
    title: str
    checked: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures and self.checked > 0

    def fail(self, msg: str):
        self.failures.append(msg)

    def to_json(self) -> dict:
        out = asdict(self)
        out["failureCount"] = len(self.failures)
        out["failures"] = self.failures[:MAX_REPORTED_FAILURES]
        out["ok"] = self.ok
        return out


def _rng(seed: int, tag: str) -> random.Random:
    return random.Random(f"{seed}:{tag}")


# ---------------------------------------------------------------------------
# 1. Witt vector and δ identities

def criterion_1(seed: int = 0, level: str = "full") -> CriterionResult:
    res = CriterionResult(1, "Witt/delta identities")
    rng = _rng(seed, "witt")
    trials = [(p, f, t) for p in (2, 3) for f in (1, 2) for t in range(LEVELS[level]["witt_trials"])]
    for p, f, t in trials:
        N = rng.randint(2, 8)
        R = witt_ring(p, f, N)
        x = R.random(rng)
        k = rng.randint(1, N - 1)
        tag = f"trial {t} (p={p}, f={f}, N={N}, k={k}, x={x!r})"
        if not (verschiebung(x).frobenius() == x * p == verschiebung(x.frobenius())):
            res.fail(f"{tag}: F∘V = V∘F = p fails")
        Vk = verschiebung_power(x, k)
        if Vk**p != verschiebung_power(x**p * p ** (k * (p - 1)), k):
            res.fail(f"{tag}: V^k(x)^p identity fails")
        rhs = verschiebung_power(x, k - 1) - verschiebung_power(x**p, k) * p ** (k * (p - 1) - 1)
        if delta(Vk) != rhs.reduce(N - 1):
            res.fail(f"{tag}: δ(V^k x) identity fails")
        res.checked += 1
    return res


# ---------------------------------------------------------------------------
# 2. window axioms, duality, exact sequences

def criterion_2(seed: int = 0, level: str = "full") -> CriterionResult:
    res = CriterionResult(2, "window axioms and duality")
    cfg = LEVELS[level]
    rng = _rng(seed, "windows")
    for t in range(cfg["windows"]):
        w = random_window(rng)
        tag = f"window {t} (p={w.p}, f={w.f}, divisors={w.divisors})"
        rep = validate(w)
        if not rep.ok:
            res.fail(f"{tag}: validate: {rep.first()}")
            continue
        dd = dual(dual(w))
        ring = w.ring
        ident = [[ring.one if i == j else ring.zero for j in range(w.rank)] for i in range(w.rank)]
        if not is_isomorphism(WindowMorphism(w, dd, ident)):
            res.fail(f"{tag}: identity is not an isomorphism w -> dual(dual(w))")
        a, b = invariants(w), invariants(dual(w))
        if (a["dim"], a["codim"]) != (b["codim"], b["dim"]):
            res.fail(f"{tag}: duality does not swap (dim, codim)")
        res.checked += 1
    kinds: dict = {}
    rng = _rng(seed, "sequences")
    for t in range(cfg["sequences"]):
        kind, w1, w2, w3, alpha, beta = random_exact_sequence(rng)
        kinds[kind] = kinds.get(kind, 0) + 1
        try:
            exact = is_exact(w1, w2, w3, alpha, beta)
        except DieudonneError as exc:
            res.fail(f"sequence {t} ({kind}): {exc.name}: {exc}")
            continue
        if not exact:
            res.fail(f"sequence {t} ({kind}): not exact")
        if w2.length() != w1.length() + w3.length():
            res.fail(f"sequence {t} ({kind}): orders are not additive")
        res.checked += 1
    res.details = {"windows": cfg["windows"], "sequences": cfg["sequences"], "sequenceKinds": dict(sorted(kinds.items()))}
    return res


# ---------------------------------------------------------------------------
# 3. cohomology against point counts

def _extension_fields(cap: int):
    """(p, f, k) with q^k <= cap."""
    out = []
    for p in (2, 3, 5, 7):
        for f in (1, 2):
            k = 1
            while (p**f) ** k <= cap:
                out.append((p, f, k))
                k += 1
    return out


def _count_points(p: int, F, name: str, n: int) -> int:
    """Brute-force |G(F)| for G in {Z/p^n, μ_{p^n}, α_p}."""
    if name == "Z/p^n":
        return p**n  # a constant group has all of its points over any field
    one, zero = F.one, F.zero
    count = 0
    for x in F.elements():
        if name == "mu_{p^n}" and x ** (p**n) == one:
            count += 1
        elif name == "alpha_p" and x**p == zero:
            count += 1
    return count


GROUPS = (("Z/p^n", 1), ("Z/p^n", 2), ("mu_{p^n}", 1), ("mu_{p^n}", 2), ("alpha_p", 1))
EXPECTED_H1 = {("Z/p^n", 1): 1, ("Z/p^n", 2): 2, ("mu_{p^n}", 1): 0, ("mu_{p^n}", 2): 0, ("alpha_p", 1): 0}


def criterion_3(seed: int = 0, level: str = "full") -> CriterionResult:
    res = CriterionResult(3, "cohomology oracle")
    fields_ = _extension_fields(LEVELS[level]["field_cap"])
    for p, f, k in fields_:
        big = get_field(p, f * k)
        for name, n in GROUPS:
            w = standard(name, p, f, n=n)
            c = cohomology(w, k)
            tag = f"{name} n={n} over F_{p}^{f * k}"
            points = _count_points(p, big, name, n)
            if p**c.h0_order_exponent != points:
                res.fail(f"{tag}: |H0| = {p}^{c.h0_order_exponent} but {points} points")
            if c.h1_dim != EXPECTED_H1[(name, n)]:
                res.fail(f"{tag}: H1 length {c.h1_dim}, expected {EXPECTED_H1[(name, n)]}")
            res.checked += 1
    res.details = {"fields": len(fields_), "largestField": max((p**f) ** k for p, f, k in fields_)}
    return res


# ---------------------------------------------------------------------------
# 4. isogeny retraction

LIFT_FIELDS = ((2, 1), (3, 1), (2, 2))
N_SMALL, N_BIG = 10, 14


def _check_correct_product(A, B, n, rng, res, tag):
    R = A[0][0].ring
    m = R.N - 1
    noise = [[b + R.random(rng) * R.p**m for b in row] for row in B]
    A2, B2 = correct_product(A, noise, n, m)
    pn = [[R(R.p**n) if i == j else R.zero for j in range(len(A))] for i in range(len(A))]
    if mat_mul(A2, B2) != pn or mat_mul(B2, A2) != pn:
        res.fail(f"{tag}: correct_product output is not exact")
    if reduce_matrix(B2, m - n) != reduce_matrix(noise, m - n):
        res.fail(f"{tag}: correct_product moved B modulo p^(m-n)")


def _check_exact_conjugator(A1, B1, n, rng, res, tag):
    R = A1[0][0].ring
    gam = random_invertible(R, len(A1), rng)
    A2 = mat_mul(gam, A1)
    B2 = mat_mul(B1, mat_inverse(gam))
    gt = exact_conjugator(A1, B1, A2, B2, n)
    if gt != reduce_matrix(gam, R.N - n):
        res.fail(f"{tag}: exact_conjugator did not recover the conjugator")


def criterion_4(seed: int = 0, level: str = "full") -> CriterionResult:
    res = CriterionResult(4, "isogeny retraction")
    seeds = LEVELS[level]["lift_seeds"]
    worst = {}
    for h in (1, 2, 3):
        for n in (1, 2):
            for p, f in LIFT_FIELDS:
                key = f"h={h},n={n},q={p**f}"
                worst[key] = 0
                for s in range(seeds):
                    rng = _rng(seed, f"lift-{key}-{s}")
                    tag = f"{key} seed {s}"
                    d = rng.randint(0, h)
                    try:
                        D = random_isogeny(p, f, N_BIG, h, d, n, rng)
                        out = lift_roundtrip(D, N_SMALL)
                        if not validate_isogeny(out.datum).ok:
                            res.fail(f"{tag}: lifted datum is not exact")
                        if out.loss > n + 4:
                            res.fail(f"{tag}: loss {out.loss} exceeds n + 4")
                        M = N_SMALL - out.loss
                        small = D.truncate(N_SMALL)
                        for name in MATRIX_FIELDS:
                            if reduce_matrix(out.datum.mat(name), M) != reduce_matrix(small.mat(name), M):
                                res.fail(f"{tag}: {name} not reproduced modulo p^{M}")
                        worst[key] = max(worst[key], out.loss)
                        _check_correct_product(small.mat("A0"), small.mat("B0"), n, rng, res, tag)
                        _check_exact_conjugator(small.mat("A0"), small.mat("B0"), n, rng, res, tag)
                    except DieudonneError as exc:
                        res.fail(f"{tag}: {exc.name}: {exc}")
                    res.checked += 1
    res.details = {"N_small": N_SMALL, "N_big": N_BIG, "maxLoss": worst}
    return res


# ---------------------------------------------------------------------------
# 5. kernel windows

def criterion_5(seed: int = 0, level: str = "full") -> CriterionResult:
    res = CriterionResult(5, "kernel windows")
    for p in (2, 3):
        for f in (1, 2):
            for n in (1, 2, 3):
                # d = h is the étale display, d = 0 the multiplicative one
                for d, name in ((1, "Z/p^n"), (0, "mu_{p^n}")):
                    N = 2 * n + 2
                    K = kernel_window(multiplication_by_p(display(p, f, N, 1, d), n))
                    if find_isomorphism(K, standard(name, p, f, n=n)) is None:
                        res.fail(f"ker p^{n} on the rank-one display d={d} over F_{p}^{f} is not {name}")
                    res.checked += 1
    rng = _rng(seed, "kernels")
    for t in range(LEVELS[level]["kernel_pairs"]):
        p, f = rng.choice(LIFT_FIELDS)
        h = rng.randint(1, 2)
        d = rng.randint(0, h)
        n1, n2 = rng.randint(1, 2), rng.randint(1, 2)
        N = 2 * (n1 + n2) + 2
        D1 = random_isogeny(p, f, N, h, d, n1, rng)
        D2 = random_isogeny(p, f, N, h, d, n2, rng, display_matrix=D1.mat("g_prime"))
        l1, l2 = kernel_window(D1).length(), kernel_window(D2).length()
        l12 = kernel_window(compose(D2, D1)).length()
        if l12 != l1 + l2:
            res.fail(f"pair {t}: order exponents {l1} + {l2} != {l12}")
        res.checked += 1
    return res


# ---------------------------------------------------------------------------
# 6. connected–étale

def criterion_6(seed: int = 0, level: str = "full") -> CriterionResult:
    res = CriterionResult(6, "connected-etale sequence")
    rng = _rng(seed, "connected-etale")
    mixed = 0
    for t in range(LEVELS[level]["ce_windows"]):
        w = random_window(rng)
        tag = f"window {t} (p={w.p}, f={w.f}, divisors={w.divisors})"
        try:
            ce = connected_etale(w)
        except DieudonneError as exc:
            res.fail(f"{tag}: {exc.name}: {exc}")
            continue
        wc, we = ce.w_conn, ce.w_et
        if not (validate(wc).ok and validate(we).ok):
            res.fail(f"{tag}: a piece is not a valid window")
        if not is_nilpotent(wc):
            res.fail(f"{tag}: connected piece is not nilpotent")
        if we.rank:
            Vres = [[a.residue() for a in row] for row in we.V_rows()]
            if rank_field(Vres, get_field(w.p, w.f)) != we.rank:
                res.fail(f"{tag}: F_N* is not bijective on the étale piece")
        if wc.length() + we.length() != w.length():
            res.fail(f"{tag}: orders do not multiply")
        if etale_rank(w) != etale_rank(we) or etale_rank(we) != we.rank:
            res.fail(f"{tag}: étale rank mismatch")
        if not is_exact(wc, w, we, ce.inclusion, ce.projection):
            res.fail(f"{tag}: the sequence is not exact")
        if not is_isomorphism(ce.splitting):
            res.fail(f"{tag}: the splitting is not an isomorphism")
        mixed += bool(wc.rank and we.rank)
        res.checked += 1
    res.details = {"windowsWithBothPieces": mixed}
    return res


# ---------------------------------------------------------------------------
# 7. de Jong criteria

DEJONG_FRAMES = [((2, 1, 4, {"x": e}, None), True) for e in range(1, 7)] + [
    ((2, 1, 4, {"x": 2, "z": 2}, None), True),
    ((2, 1, 4, {"x": 3}, {"x": {(1,): 1}}), False),  # φ(x) = x² + 2x
]


def criterion_7(seed: int = 0, level: str = "full") -> CriterionResult:
    res = CriterionResult(7, "de Jong criteria")
    rows = []
    for (p, f, N, truncs, pert), want in DEJONG_FRAMES:
        fr = monomial_frame(p, f, N, truncs, pert)
        rep = dejong_report(fr)
        tag = f"frame {truncs} perturbation {pert}"
        if rep["verdict"] != want:
            res.fail(f"{tag}: verdict {rep['verdict']}, expected {want}")
        if not want and rep["condition1"]:
            res.fail(f"{tag}: condition1 should fail")
        if rep["verdict"]:
            b = rep["mu_alpha_bijection"]
            if not (b.get("checked") and b.get("ok")):
                res.fail(f"{tag}: μ_p/α_p bijection not verified: {b}")
        rows.append({"truncs": dict(truncs), "verdict": rep["verdict"], "condition1": rep["condition1"],
                     "condition2": rep["condition2"], "mu_p": rep.get("mu_alpha_bijection", {}).get("mu_p")})
        res.checked += 1
    res.details = {"frames": rows}
    return res


# ---------------------------------------------------------------------------
# 8. the γ / divided Frobenius square

SQUARE_ENUMERATION_CAP = 2**12


def criterion_8(seed: int = 0, level: str = "full", fixture_dir=None) -> CriterionResult:
    res = CriterionResult(8, "gamma / divided Frobenius compatibility")
    frames_seen = 0
    nonzero = 0
    for path in fixture_paths(fixture_dir):
        doc = load(path)
        if doc["kind"] != "frame":
            continue
        fr = frame_from_json(doc)
        if fr.N < 3:
            fr = fr.with_precision(3)
        frames_seen += 1
        R = ReductionRing(fr)
        for a in _span(R, alpha_p_elements(R), SQUARE_ENUMERATION_CAP):
            out = compatibility_square(fr, a)
            if not out["ok"]:
                res.fail(f"{doc['vars']}: square fails at {a!r}")
            nonzero += any(not x.is_zero() for x in out["mid"])
            res.checked += 1
    res.details = {"frames": frames_seen, "elements": res.checked, "nonzeroInstances": nonzero}
    return res


# ---------------------------------------------------------------------------
# fixtures and the runner

def check_fixtures(fixture_dir=None) -> CriterionResult:
    res = CriterionResult(0, "bundled fixtures")
    for path in fixture_paths(fixture_dir):
        for msg in check_fixture(path):
            res.fail(msg)
        res.checked += 1
    return res


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8)


def run_suite(seed: int = 0, level: str = "quick", fixture_dir=None) -> dict:
    """Fixture check plus criteria 1-8 (criterion 9 compares two runs)."""
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    results = [check_fixtures(fixture_dir)]
    for crit in CRITERIA:
        if crit is criterion_8:
            results.append(crit(seed, level, fixture_dir))
        else:
            results.append(crit(seed, level))
    items = [r.to_json() for r in results]
    return {"level": level, "ok": all(r.ok for r in results), "criteria": items}
