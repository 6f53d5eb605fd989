"""JSON formats for elements, matrices, windows, isogeny data and frames.

A W(F_q)/p^N element is written as its Teichmüller digits "d0,d1,...",
each digit being the coefficient vector "c0|c1|..." of an F_q element in
the recorded defining polynomial.  Non-negative integers are accepted on
input as a shorthand.  Every document carries "schemaVersion" and "kind"
and is checked against the bundled JSON schema before it is decoded.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

from .errors import ParseError
from .fields import get_field
from .frames import MonomialFrame
from .isogeny import IsogenyDatum
from .padic import PadicElem, witt_ring
from .windows import MixedCharWindow, TorsionWindow, make_mixed_window

SCHEMA_VERSION = 1


@lru_cache(maxsize=None)
def schema() -> dict:
    text = resources.files("dieudonne").joinpath("data/schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def loads(text: str) -> dict:
    """Parse and schema-check a document; raises ParseError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno} (char {exc.pos}): {exc.msg}") from exc
    try:
        jsonschema.validate(doc, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ParseError(f"schema violation at {where}: {exc.message}") from exc
    return doc


def load(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return loads(text)


def dumps(doc: dict) -> str:
    """Canonical JSON text (sorted keys, fixed separators, trailing newline)."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# rings and elements

def ring_to_json(p: int, f: int, N: int) -> dict:
    return {"p": p, "f": f, "N": N, "modulus": list(get_field(p, f).modulus)}


def ring_from_json(obj: dict):
    p, f, N = obj["p"], obj.get("f", 1), obj["N"]
    F = get_field(p, f)
    if "modulus" in obj and list(obj["modulus"]) != list(F.modulus):
        raise ParseError(f"field polynomial {obj['modulus']} differs from the built-in choice {list(F.modulus)}")
    return witt_ring(p, f, N)


def elem_to_str(a: PadicElem) -> str:
    return ",".join("|".join(str(c) for c in d.coeffs()) for d in a.digits())


def elem_from_json(x, ring) -> PadicElem:
    if isinstance(x, int):
        return ring(x)
    digits = []
    F = ring.field
    parts = x.split(",")
    if len(parts) > ring.N:
        raise ParseError(f"element {x!r} has more than N = {ring.N} digits")
    for part in parts:
        cs = [int(c) for c in part.split("|")]
        if len(cs) > ring.f or any(not 0 <= c < ring.p for c in cs):
            raise ParseError(f"bad digit {part!r} in element {x!r}")
        digits.append(F.from_coeffs(cs))
    return ring.from_digits(digits)


def matrix_to_json(M):
    return [[elem_to_str(a) for a in row] for row in M]


def matrix_from_json(rows, ring):
    return [[elem_from_json(x, ring) for x in row] for row in rows]


# ---------------------------------------------------------------------------
# windows

def window_to_json(w: TorsionWindow) -> dict:
    return {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "window",
        "ring": ring_to_json(w.p, w.f, w.N),
        "divisors": list(w.divisors),
        "torsion": w.torsion,
        "F": matrix_to_json(w.F),
        "V": matrix_to_json(w.V),
    }


def window_from_json(doc: dict) -> TorsionWindow:
    R = ring_from_json(doc["ring"])
    d = tuple(doc["divisors"])
    r = len(d)
    F = matrix_from_json(doc["F"], R)
    V = matrix_from_json(doc["V"], R)
    if len(F) != r or len(V) != r or any(len(row) != r for row in F + V):
        raise ParseError("F and V must be square of size len(divisors)")
    if "torsion" in doc and doc["torsion"] != max(d, default=0):
        raise ParseError("torsion must equal the largest divisor")
    if any(x > R.N for x in d):
        raise ParseError("a divisor exceeds the ring precision")
    return TorsionWindow(R.p, R.f, d, F, V, R.N)


def mixed_window_to_json(w: MixedCharWindow) -> dict:
    return {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "mixed_window",
        "ring": ring_to_json(w.p, w.f, w.N),
        "uTrunc": w.M,
        "E": [elem_to_str(c) for c in w.E],
        "F": [[[elem_to_str(c) for c in entry] for entry in row] for row in w.F],
    }


def mixed_window_from_json(doc: dict) -> MixedCharWindow:
    R = ring_from_json(doc["ring"])
    M = doc["uTrunc"]
    E = [elem_from_json(c, R) for c in doc["E"]]
    F = [[[elem_from_json(c, R) for c in entry] for entry in row] for row in doc["F"]]
    if any(len(row) != len(F) for row in F):
        raise ParseError("F must be square")
    return make_mixed_window(R.p, R.f, R.N, M, E, F)


# ---------------------------------------------------------------------------
# isogeny data

_ISO_KEYS = {"g": "g", "g_prime": "gPrime", "A0": "A0", "Am1": "Am1", "B0": "B0", "Bm1": "Bm1"}


def isogeny_to_json(D: IsogenyDatum, display_big=None, extra: dict | None = None) -> dict:
    doc = {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "isogeny",
        "ring": ring_to_json(D.p, D.f, D.N),
        "h": D.h,
        "d": D.d,
        "n": D.n,
    }
    for attr, key in _ISO_KEYS.items():
        doc[key] = matrix_to_json(D.mat(attr))
    if display_big is not None:
        N = display_big[0][0].ring.N
        doc["display"] = {"N": N, "g": matrix_to_json(display_big)}
    if extra:
        doc.update(extra)
    return doc


def isogeny_from_json(doc: dict):
    """(datum, display matrix at higher precision or None)."""
    R = ring_from_json(doc["ring"])
    h = doc["h"]
    mats = {}
    for attr, key in _ISO_KEYS.items():
        M = matrix_from_json(doc[key], R)
        if len(M) != h or any(len(row) != h for row in M):
            raise ParseError(f"{key} must be {h}×{h}")
        mats[attr] = M
    D = IsogenyDatum(R.p, R.f, R.N, h, doc["d"], doc["n"], **mats)
    big = None
    if "display" in doc:
        RB = witt_ring(R.p, R.f, doc["display"]["N"])
        big = matrix_from_json(doc["display"]["g"], RB)
        if len(big) != h or any(len(row) != h for row in big):
            raise ParseError(f"display.g must be {h}×{h}")
    return D, big


# ---------------------------------------------------------------------------
# frames

def frame_to_json(fr: MonomialFrame) -> dict:
    vars_ = []
    for i, (name, e) in enumerate(zip(fr.names, fr.truncs)):
        pert = [[list(ex), elem_to_str(c)] for ex, c in fr.h[i].pairs()]
        vars_.append({"name": name, "trunc": e, "phiPerturbation": pert})
    return {"schemaVersion": SCHEMA_VERSION, "kind": "frame", "p": fr.p, "f": fr.f, "N": fr.N, "vars": vars_}


def frame_from_json(doc: dict) -> MonomialFrame:
    p, f, N = doc["p"], doc.get("f", 1), doc["N"]
    R = witt_ring(p, f, N)
    names, truncs, pert = [], [], {}
    r = len(doc["vars"])
    for i, v in enumerate(doc["vars"]):
        names.append(v["name"])
        truncs.append(v.get("trunc"))
        terms = {}
        for ex, c in v.get("phiPerturbation", []):
            if len(ex) != r:
                raise ParseError(f"perturbation exponent {ex} of {v['name']} has the wrong length")
            terms[tuple(ex)] = elem_from_json(c, R)
        if terms:
            pert[i] = terms
    if len(set(names)) != len(names):
        raise ParseError("variable names must be distinct")
    return MonomialFrame(p, f, N, names, truncs, pert)


DECODERS = {
    "window": window_from_json,
    "mixed_window": mixed_window_from_json,
    "isogeny": isogeny_from_json,
    "frame": frame_from_json,
}
