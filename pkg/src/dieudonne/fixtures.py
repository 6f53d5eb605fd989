"""The bundled fixture set: how it is generated and how it is checked.

Each fixture is a schema-valid document with an "expected" block.  The
files under data/fixtures are produced by `build_fixture_documents`; the
self-test recomputes every expected value from the document itself.
"""

from __future__ import annotations

import os
import random
from importlib import resources

from .errors import DieudonneError
from .frames import monomial_frame
from .isogeny import (
    canonical_lift,
    display,
    empirical_loss_search,
    multiplication_by_p,
    random_isogeny,
)
from .nilpotence import dejong_report
from .serialize import (
    dumps,
    frame_from_json,
    frame_to_json,
    isogeny_from_json,
    isogeny_to_json,
    load,
    window_from_json,
    window_to_json,
)
from .windows import invariants, standard, zero_window

ROUNDTRIP = {"p": 2, "f": 2, "h": 2, "n": 1, "N_small": 10, "N_big": 14, "seeds": range(20)}


def default_directory():
    return resources.files("dieudonne").joinpath("data/fixtures")


def window_expectation(w) -> dict:
    inv = invariants(w)
    return {
        "orderExponent": inv["order_exponent"],
        "dim": inv["dim"],
        "codim": inv["codim"],
        "etaleRank": inv["etale_rank"],
        "nilpotent": inv["etale_rank"] == 0,
    }


def frame_expectation(fr) -> dict:
    rep = dejong_report(fr)
    return {k: rep[k] for k in ("condition1", "condition2", "verdict")}


def _window_docs():
    items = [
        ("window_Z_2.json", standard("Z/p", 2)),
        ("window_Z_9.json", standard("Z/p^n", 3, n=2)),
        ("window_mu_2.json", standard("mu_p", 2)),
        ("window_mu_3_f2.json", standard("mu_p", 3, 2)),
        ("window_alpha_3.json", standard("alpha_p", 3)),
        ("window_ss_4.json", standard("ss_pkernel", 2, 2)),
        ("window_empty.json", zero_window(2, 1)),
    ]
    out = {}
    for name, w in items:
        doc = window_to_json(w)
        doc["expected"] = window_expectation(w)
        out[name] = doc
    return out


def _roundtrip_doc():
    c = ROUNDTRIP
    search = empirical_loss_search(c["h"], c["n"], c["p"], c["f"], c["seeds"], c["N_small"], c["N_big"])
    losses = search["losses"]
    seed = list(c["seeds"])[losses.index(search["max_loss"])]
    # regenerate the datum exactly as the search did
    rng = random.Random(f"{c['p']}-{c['f']}-{c['h']}-{c['n']}-{seed}")
    d = rng.randint(0, c["h"])
    D = random_isogeny(c["p"], c["f"], c["N_big"], c["h"], d, c["n"], rng)
    small = D.truncate(c["N_small"])
    doc = isogeny_to_json(small, D.mat("g"))
    doc["expected"] = {"loss": search["max_loss"], "targetPrecision": c["N_big"]}
    return doc


def _mult_by_p_doc():
    big = display(3, 1, 12, 2, 1)
    D = multiplication_by_p(big, 1).truncate(8)
    doc = isogeny_to_json(D, big.rows())
    doc["expected"] = {"loss": 0, "targetPrecision": 12}
    return doc


FRAME_SPECS = [
    ("frame_x1.json", (2, 1, 4, {"x": 1}, None)),
    ("frame_x2.json", (2, 1, 4, {"x": 2}, None)),
    ("frame_x3.json", (2, 1, 4, {"x": 3}, None)),
    ("frame_x4.json", (2, 1, 4, {"x": 4}, None)),
    ("frame_x5.json", (2, 1, 4, {"x": 5}, None)),
    ("frame_x6.json", (2, 1, 4, {"x": 6}, None)),
    ("frame_x2_z2.json", (2, 1, 4, {"x": 2, "z": 2}, None)),
    ("frame_x3_perturbed.json", (2, 1, 4, {"x": 3}, {"x": {(1,): 1}})),
    ("frame_p3_x4.json", (3, 1, 3, {"x": 4}, None)),
    ("frame_q4_x3_z2.json", (2, 2, 3, {"x": 3, "z": 2}, None)),
    ("frame_empty_q4.json", (2, 2, 3, {}, None)),
]


def _frame_docs():
    out = {}
    for name, (p, f, N, truncs, pert) in FRAME_SPECS:
        fr = monomial_frame(p, f, N, truncs, pert)
        doc = frame_to_json(fr)
        doc["expected"] = frame_expectation(fr)
        out[name] = doc
    return out


def build_fixture_documents() -> dict:
    """filename -> document, deterministically."""
    docs = {}
    docs.update(_window_docs())
    docs["isogeny_roundtrip.json"] = _roundtrip_doc()
    docs["isogeny_mult_by_p.json"] = _mult_by_p_doc()
    docs.update(_frame_docs())
    return docs


def write_fixtures(directory) -> list:
    os.makedirs(directory, exist_ok=True)
    names = []
    for name, doc in sorted(build_fixture_documents().items()):
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            fh.write(dumps(doc))
        names.append(name)
    return names


def fixture_paths(directory=None) -> list:
    directory = default_directory() if directory is None else directory
    if isinstance(directory, (str, os.PathLike)):
        names = sorted(n for n in os.listdir(directory) if n.endswith(".json"))
        return [os.path.join(directory, n) for n in names]
    return sorted((p for p in directory.iterdir() if p.name.endswith(".json")), key=lambda p: p.name)


def check_fixture(path) -> list:
    """Failure messages for one fixture (empty when it checks out)."""
    name = os.path.basename(str(path))
    try:
        doc = load(path)
    except DieudonneError as exc:
        return [f"{name}: {exc.name}: {exc}"]
    expected = doc.get("expected")
    if expected is None:
        return [f"{name}: no expected block"]
    try:
        if doc["kind"] == "window":
            got = window_expectation(window_from_json(doc))
        elif doc["kind"] == "frame":
            got = frame_expectation(frame_from_json(doc))
        elif doc["kind"] == "isogeny":
            D, big = isogeny_from_json(doc)
            if big is None:
                return [f"{name}: isogeny fixture without a display"]
            res = canonical_lift(D, big, expected.get("targetPrecision", big[0][0].ring.N))
            got = {"loss": res.loss, "targetPrecision": res.datum.N}
        else:
            return [f"{name}: unsupported kind {doc['kind']}"]
    except DieudonneError as exc:
        return [f"{name}: {exc.name}: {exc}"]
    diffs = [f"{name}: {k} expected {expected.get(k)!r}, got {v!r}" for k, v in got.items() if expected.get(k) != v]
    return diffs
