"""Command-line front end.

    dieudonne classify --in window.json [--extension-degrees 1,2]
    dieudonne cohomology --in window.json|frame.json [--extension-degrees 1,2]
    dieudonne lift-isogeny --in isogeny.json [--target-precision N]
    dieudonne frame-check --in frame.json
    dieudonne selftest [--level quick|full]

Every command prints one JSON report (to --out or stdout).  With
--format text a human-readable rendering is printed instead.  Exit codes:
0 success, 1 mathematical failure, 2 malformed input, 3 precision.
"""

from __future__ import annotations

import argparse
import hashlib
import sys

from . import __version__
from .acceptance import run_suite
from .errors import DieudonneError, InvalidWindowError, ParseError, PrecisionError
from .isogeny import canonical_lift
from .linalg import lift_matrix
from .nilpotence import ReductionRing, artin_schreier_cohomology, dejong_report
from .serialize import (
    SCHEMA_VERSION,
    dumps,
    elem_to_str,
    frame_from_json,
    isogeny_from_json,
    isogeny_to_json,
    loads,
    mixed_window_from_json,
    window_from_json,
    window_to_json,
)
from .windows import (
    cohomology,
    connected_etale,
    dual,
    invariants,
    recover_verschiebung,
    validate,
)

EXIT_OK, EXIT_FAILURE, EXIT_PARSE, EXIT_PRECISION = 0, 1, 2, 3


class ReportFailure(Exception):
    """A command ran but its mathematical check failed (exit code 1)."""

    def __init__(self, result):
        super().__init__("check failed")
        self.result = result


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, PrecisionError):
        return EXIT_PRECISION
    return EXIT_FAILURE


def parse_degrees(text: str) -> list[int]:
    try:
        ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad extension degree list {text!r}")
    if not ks or any(k < 1 for k in ks):
        raise argparse.ArgumentTypeError("extension degrees must be positive integers")
    return ks


def read_input(path: str) -> tuple[dict, str]:
    """(document, sha256 of the raw bytes)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not UTF-8 (byte {exc.start})") from exc
    return loads(text), hashlib.sha256(raw).hexdigest()


# ---------------------------------------------------------------------------
# command bodies: each returns the "result" object

def _window_summary(w, ks) -> dict:
    inv = invariants(w)
    ce = connected_etale(w)
    return {
        "kind": "window",
        "p": w.p,
        "f": w.f,
        "divisors": list(w.divisors),
        "order": w.p ** inv["order_exponent"],
        "orderExponent": inv["order_exponent"],
        "dim": inv["dim"],
        "codim": inv["codim"],
        "etaleRank": inv["etale_rank"],
        "nilpotent": inv["etale_rank"] == 0,
        "connectedEtale": {
            "connectedOrder": w.p ** ce.w_conn.length(),
            "etaleOrder": w.p ** ce.w_et.length(),
            "connectedDivisors": list(ce.w_conn.divisors),
            "etaleDivisors": list(ce.w_et.divisors),
        },
        "dual": window_to_json(dual(w)),
        "cohomology": [_cohomology_entry(w, k) for k in ks],
    }


def _cohomology_entry(w, k) -> dict:
    c = cohomology(w, k)
    return {"k": k, "h0": list(c.h0), "h0Order": w.p ** c.h0_order_exponent, "h1": list(c.h1), "h1Length": c.h1_dim}


def _load_window(doc):
    w = window_from_json(doc)
    rep = validate(w)
    if not rep.ok:
        raise ReportFailure({"error": "invalid-window", "validation": {"ok": False, "failures": rep.failures}})
    return w


def cmd_classify(doc, args) -> dict:
    if doc["kind"] == "window":
        return _window_summary(_load_window(doc), args.extension_degrees)
    if doc["kind"] == "mixed_window":
        w = mixed_window_from_json(doc)
        res = recover_verschiebung(w)
        out = {"kind": "mixed_window", "h": w.h, "d": res.d, "ok": res.ok,
               "V": [[[elem_to_str(c) for c in entry] for entry in row] for row in res.V]}
        if not res.ok:
            raise ReportFailure(out)
        return out
    raise ParseError(f"classify expects a window, not a {doc['kind']}")


def cmd_cohomology(doc, args) -> dict:
    if doc["kind"] == "window":
        w = _load_window(doc)
        return {"kind": "window", "cohomology": [_cohomology_entry(w, k) for k in args.extension_degrees]}
    if doc["kind"] == "frame":
        R = ReductionRing(frame_from_json(doc))
        out = {"kind": "frame"}
        for key, which in (("Z/p", "Z/p"), ("alpha_p", "alpha_p")):
            h0, h1 = artin_schreier_cohomology(R, which)
            out[key] = {"h0Dim": len(h0), "h0Basis": [repr(a) for a in h0], "h1Dim": h1}
        return out
    raise ParseError(f"cohomology expects a window or a frame, not a {doc['kind']}")


def cmd_lift(doc, args) -> dict:
    if doc["kind"] != "isogeny":
        raise ParseError(f"lift-isogeny expects an isogeny datum, not a {doc['kind']}")
    D, big = isogeny_from_json(doc)
    target = args.target_precision
    if target is None:
        target = big[0][0].ring.N if big is not None else D.N + D.n + 4
    if big is None:
        g = lift_matrix(D.mat("g"), target)
    elif big[0][0].ring.N >= target:
        g = [[a.reduce(target) for a in row] for row in big]
    else:
        g = lift_matrix(big, target)
    res = canonical_lift(D, g, target)
    out = {"loss": res.loss, "agreement": res.agreement, "budget": res.budget,
           "inputPrecision": D.N, "targetPrecision": target}
    if args.report == "full":
        out["datum"] = isogeny_to_json(res.datum)
    exp = doc.get("expected", {})
    if "loss" in exp and exp.get("targetPrecision", target) == target:
        out["expectedLoss"] = exp["loss"]
        out["matchesExpected"] = exp["loss"] == res.loss
        if not out["matchesExpected"]:
            raise ReportFailure(out)
    return out


def cmd_frame_check(doc, args) -> dict:
    if doc["kind"] != "frame":
        raise ParseError(f"frame-check expects a frame, not a {doc['kind']}")
    fr = frame_from_json(doc)
    rep = dejong_report(fr)
    rep["frame"] = repr(fr)
    return rep


def cmd_selftest(args) -> dict:
    out = run_suite(args.seed, args.level, args.fixtures)
    out["seed"] = args.seed
    if not out["ok"]:
        out["failureList"] = [
            {"criterion": c["number"], "title": c["title"], "failures": c["failures"]}
            for c in out["criteria"]
            if not c["ok"]
        ]
        raise ReportFailure(out)
    return out


# ---------------------------------------------------------------------------
# text rendering

def render_text(report: dict) -> str:
    lines = [f"{report['tool']} {report['version']} {report['command']}"]
    if report.get("error"):
        err = report["error"]
        lines.append(f"error {err['name']}: {err['message']}")
    res = report.get("result") or {}
    if report["command"] == "selftest" and "criteria" in res:
        for c in res["criteria"]:
            status = "PASS" if c["ok"] else "FAIL"
            lines.append(f"  [{status}] {c['number']}. {c['title']} ({c['checked']} checks, {c['failureCount']} failures)")
            lines.extend(f"      {m}" for m in c["failures"][:5])
        return "\n".join(lines) + "\n"
    for key, value in res.items():
        if key in ("dual", "datum"):
            continue
        lines.append(f"  {key}: {value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(prog="dieudonne", description="Windows, isogeny data and frames for finite flat group schemes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="invariants of a window")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--extension-degrees", type=parse_degrees, default=[1])

    p = sub.add_parser("cohomology", parents=[common], help="H0 and H1 over finite fields or of a frame")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--extension-degrees", type=parse_degrees, default=[1])

    p = sub.add_parser("lift-isogeny", parents=[common], help="canonical lift of a truncated isogeny datum")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--target-precision", type=int)
    p.add_argument("--report", choices=("loss", "full"), default="full")

    p = sub.add_parser("frame-check", parents=[common], help="the two nilpotence criteria for a frame")
    p.add_argument("--in", dest="input", required=True)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--fixtures", help=argparse.SUPPRESS)
    return parser


COMMANDS = {
    "classify": cmd_classify,
    "cohomology": cmd_cohomology,
    "lift-isogeny": cmd_lift,
    "frame-check": cmd_frame_check,
}


def run(args) -> tuple[dict, int]:
    report = {
        "schemaVersion": SCHEMA_VERSION,
        "tool": "dieudonne",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "inputSha256": None,
        "result": None,
    }
    code = EXIT_OK
    try:
        if args.command == "selftest":
            report["result"] = cmd_selftest(args)
        else:
            doc, digest = read_input(args.input)
            report["inputSha256"] = digest
            report["result"] = COMMANDS[args.command](doc, args)
    except ReportFailure as exc:
        report["result"] = exc.result
        report["error"] = {"name": "check-failed", "message": "the requested check failed"}
        if isinstance(exc.result, dict) and exc.result.get("error") == "invalid-window":
            report["error"] = {"name": InvalidWindowError.name, "message": exc.result["validation"]["failures"][0]}
        code = EXIT_FAILURE
    except DieudonneError as exc:
        report["error"] = {"name": exc.name, "message": str(exc)}
        code = exit_code_for(exc)
    report["exitCode"] = code
    return report, code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report, code = run(args)
    text = render_text(report) if args.format == "text" else dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
