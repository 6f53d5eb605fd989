import hashlib
import json
import os
import shutil
import subprocess
import sys

import pytest

from dieudonne import __version__
from dieudonne.cli import main
from dieudonne.fixtures import default_directory
from dieudonne.serialize import dumps, isogeny_from_json, isogeny_to_json, load, mixed_window_to_json, window_to_json
from dieudonne.windows import make_mixed_window, standard, zero_window

FIXTURES = str(default_directory())


def fixture(name):
    return os.path.join(FIXTURES, name)


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(dumps(doc) if isinstance(doc, dict) else doc, encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_classify_mu_p(capsys):
    code, rep = run(capsys, "classify", "--in", fixture("window_mu_2.json"))
    assert code == 0 and rep["exitCode"] == 0
    res = rep["result"]
    assert (res["order"], res["dim"], res["codim"], res["etaleRank"], res["nilpotent"]) == (2, 1, 0, 0, True)
    assert res["connectedEtale"]["connectedOrder"] == 2 and res["connectedEtale"]["etaleOrder"] == 1
    assert res["dual"]["F"] == [["0"]] and res["dual"]["V"] == [["1"]]
    assert rep["version"] == __version__ and rep["tool"] == "dieudonne"
    with open(fixture("window_mu_2.json"), "rb") as fh:
        assert rep["inputSha256"] == hashlib.sha256(fh.read()).hexdigest()


def test_classify_empty_window(tmp_path, capsys):
    path = write(tmp_path, "empty.json", window_to_json(zero_window(3, 1)))
    code, rep = run(capsys, "classify", "--in", path, "--extension-degrees", "1,2")
    res = rep["result"]
    assert code == 0
    assert res["order"] == 1
    assert all(res[k] == 0 for k in ("orderExponent", "dim", "codim", "etaleRank"))
    assert [c["h0Order"] for c in res["cohomology"]] == [1, 1]
    assert [c["h1Length"] for c in res["cohomology"]] == [0, 0]


def test_classify_cohomology_degrees(tmp_path, capsys):
    path = write(tmp_path, "z.json", window_to_json(standard("Z/p", 3)))
    code, rep = run(capsys, "classify", "--in", path, "--extension-degrees", "1,3")
    assert [(c["k"], c["h0Order"], c["h1Length"]) for c in rep["result"]["cohomology"]] == [(1, 3, 1), (3, 3, 1)]


def test_classify_mixed_window(tmp_path, capsys):
    w = make_mixed_window(2, 1, 3, 4, [2, 1], [[[1], [0]], [[0], [2, 1]]])
    path = write(tmp_path, "mixed.json", mixed_window_to_json(w))
    code, rep = run(capsys, "classify", "--in", path)
    assert code == 0 and rep["result"]["d"] == 1 and rep["result"]["ok"]


def test_invalid_window_exits_1(tmp_path, capsys):
    doc = window_to_json(standard("Z/p", 2))
    doc["F"] = [["1"]]  # F = V = 1 violates FV = p
    code, rep = run(capsys, "classify", "--in", write(tmp_path, "bad.json", doc))
    assert code == 1
    assert rep["error"]["name"] == "invalid-window"
    assert rep["result"]["validation"]["ok"] is False


def test_malformed_json_exits_2(tmp_path, capsys):
    code, rep = run(capsys, "classify", "--in", write(tmp_path, "bad.json", '{"kind":\n ]'))
    assert code == 2 and rep["error"]["name"] == "parse-error"
    assert "line 2 column" in rep["error"]["message"]


def test_wrong_kind_and_missing_file(tmp_path, capsys):
    code, rep = run(capsys, "lift-isogeny", "--in", fixture("window_mu_2.json"))
    assert code == 2
    code, rep = run(capsys, "classify", "--in", str(tmp_path / "absent.json"))
    assert code == 2 and "cannot read" in rep["error"]["message"]


def test_cohomology_of_frame(capsys):
    code, rep = run(capsys, "cohomology", "--in", fixture("frame_x3.json"))
    assert code == 0
    assert rep["result"]["Z/p"]["h0Dim"] == 1 and rep["result"]["Z/p"]["h1Dim"] == 1
    assert rep["result"]["alpha_p"]["h0Dim"] == 1


def test_cohomology_of_window(capsys):
    code, rep = run(capsys, "cohomology", "--in", fixture("window_alpha_3.json"), "--extension-degrees", "2")
    assert rep["result"]["cohomology"] == [{"k": 2, "h0": [], "h0Order": 1, "h1": [], "h1Length": 0}]


def test_lift_roundtrip_fixture(capsys):
    expected = load(fixture("isogeny_roundtrip.json"))["expected"]
    code, rep = run(capsys, "lift-isogeny", "--in", fixture("isogeny_roundtrip.json"), "--report", "loss")
    assert code == 0
    assert rep["result"]["loss"] == expected["loss"] == 2
    assert rep["result"]["matchesExpected"] is True
    assert "datum" not in rep["result"]


def test_lift_mult_by_p_fixture(capsys):
    code, rep = run(capsys, "lift-isogeny", "--in", fixture("isogeny_mult_by_p.json"), "--target-precision", "12")
    assert code == 0 and rep["result"]["loss"] == 0
    assert rep["result"]["datum"]["ring"]["N"] == 12


def test_lift_insufficient_precision_exits_3(tmp_path, capsys):
    D, _ = isogeny_from_json(load(fixture("isogeny_roundtrip.json")))
    path = write(tmp_path, "short.json", isogeny_to_json(D.truncate(1)))
    code, rep = run(capsys, "lift-isogeny", "--in", path)
    assert code == 3
    assert rep["error"]["name"] == "precision-budget-exceeded"


def test_lift_mismatched_expectation_exits_1(tmp_path, capsys):
    doc = load(fixture("isogeny_mult_by_p.json"))
    doc["expected"]["loss"] = 1
    code, rep = run(capsys, "lift-isogeny", "--in", write(tmp_path, "m.json", doc))
    assert code == 1 and rep["result"]["matchesExpected"] is False


def test_frame_check(capsys):
    code, rep = run(capsys, "frame-check", "--in", fixture("frame_x2_z2.json"))
    assert code == 0 and rep["result"]["verdict"] is True
    code, rep = run(capsys, "frame-check", "--in", fixture("frame_x3_perturbed.json"))
    assert code == 0
    assert rep["result"]["verdict"] is False and rep["result"]["condition1"] is False


def test_text_format(tmp_path, capsys):
    out = tmp_path / "r.txt"
    code = main(["frame-check", "--in", fixture("frame_x3.json"), "--format", "text", "--out", str(out)])
    assert code == 0 and capsys.readouterr().out == ""
    text = out.read_text(encoding="utf-8")
    assert text.startswith(f"dieudonne {__version__} frame-check")
    assert "verdict: True" in text


def test_reports_are_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        main(["classify", "--in", fixture("window_ss_4.json"), "--seed", "7", "--out", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_unknown_flag_is_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--in", fixture("window_mu_2.json"), "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["classify", "--in", fixture("window_mu_2.json"), "--extension-degrees", "0"])


def test_selftest_detects_corrupted_fixture(tmp_path, capsys):
    d = tmp_path / "fixtures"
    shutil.copytree(FIXTURES, d)
    doc = load(str(d / "frame_x3.json"))
    doc["expected"]["verdict"] = False
    (d / "frame_x3.json").write_text(dumps(doc), encoding="utf-8")
    code, rep = run(capsys, "selftest", "--fixtures", str(d))
    assert code == 1
    failing = {item["criterion"] for item in rep["result"]["failureList"]}
    assert 0 in failing


def test_console_script_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json", encoding="utf-8")
    cmd = [sys.executable, "-m", "dieudonne.cli", "classify", "--in", str(bad)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["exitCode"] == 2
