import json
import os
import random

import pytest
from hypothesis import given, strategies as st

from dieudonne.errors import ParseError
from dieudonne.fixtures import FRAME_SPECS, build_fixture_documents, check_fixture, default_directory, fixture_paths
from dieudonne.frames import monomial_frame
from dieudonne.generators import random_window
from dieudonne.isogeny import display, multiplication_by_p, random_isogeny
from dieudonne.padic import witt_ring
from dieudonne.serialize import (
    dumps,
    elem_from_json,
    elem_to_str,
    frame_from_json,
    frame_to_json,
    isogeny_from_json,
    isogeny_to_json,
    load,
    loads,
    mixed_window_from_json,
    mixed_window_to_json,
    window_from_json,
    window_to_json,
)
from dieudonne.windows import make_mixed_window, standard, windows_equal, zero_window


def roundtrip(doc):
    return loads(dumps(doc))


@given(st.sampled_from([(2, 1), (3, 1), (2, 2), (5, 2)]), st.integers(1, 5), st.integers(0, 2**32))
def test_element_roundtrip(pf, N, seed):
    R = witt_ring(*pf, N)
    a = R.random(random.Random(seed))
    assert elem_from_json(elem_to_str(a), R) == a


def test_element_format():
    R = witt_ring(3, 1, 3)
    assert elem_to_str(R(0)) == "0,0,0"
    assert elem_to_str(R(1)) == "1,0,0"
    assert elem_from_json(7, R) == R(7)
    # digits are Teichmüller, so 3 is written with a single unit digit in position 1
    assert elem_from_json("0,1", R) == R(3)
    with pytest.raises(ParseError):
        elem_from_json("0,0,0,1", R)
    with pytest.raises(ParseError):
        elem_from_json("3", R)


def test_standard_windows_roundtrip():
    for w in (standard("Z/p", 2), standard("mu_p", 3, 2), standard("alpha_p", 5),
              standard("ss_pkernel", 2, 2), standard("Z/p^n", 3, n=2), zero_window(2, 1)):
        back = window_from_json(roundtrip(window_to_json(w)))
        assert windows_equal(w, back)


@given(st.integers(0, 2**32))
def test_random_window_roundtrip(seed):
    w = random_window(random.Random(seed))
    assert windows_equal(window_from_json(roundtrip(window_to_json(w))), w)


def test_mixed_window_roundtrip():
    w = make_mixed_window(2, 1, 3, 4, [2, 1], [[[1], [0]], [[0], [2, 1]]])
    back = mixed_window_from_json(roundtrip(mixed_window_to_json(w)))
    assert back == w


def test_isogeny_roundtrip():
    rng = random.Random(5)
    D = random_isogeny(3, 1, 6, 2, 1, 1, rng)
    back, big = isogeny_from_json(roundtrip(isogeny_to_json(D)))
    assert big is None
    for attr in ("g", "g_prime", "A0", "Am1", "B0", "Bm1"):
        assert back.mat(attr) == D.mat(attr)
    G = display(2, 1, 9, 2, 1)
    P = multiplication_by_p(G, 1).truncate(5)
    back, big = isogeny_from_json(roundtrip(isogeny_to_json(P, G.rows())))
    assert big == G.rows() and back.N == 5


def test_frame_roundtrip():
    for _, shape in FRAME_SPECS:
        fr = monomial_frame(*shape)
        back = frame_from_json(roundtrip(frame_to_json(fr)))
        assert frame_to_json(back) == frame_to_json(fr)


def test_malformed_json_reports_position():
    with pytest.raises(ParseError, match="line 2 column"):
        loads('{"kind": "window",\n  oops}')


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("schemaVersion"),
    lambda d: d.update(schemaVersion=2),
    lambda d: d.update(kind="torus"),
    lambda d: d.pop("F"),
    lambda d: d.update(divisors=[-1]),
])
def test_schema_violations(mutate):
    doc = window_to_json(standard("Z/p", 2))
    mutate(doc)
    with pytest.raises(ParseError):
        loads(json.dumps(doc))


def test_semantic_parse_errors():
    doc = window_to_json(standard("Z/p", 2, 2))
    doc["ring"]["modulus"] = [1, 0, 1]
    with pytest.raises(ParseError, match="differs"):
        window_from_json(loads(json.dumps(doc)))
    doc = window_to_json(standard("Z/p", 2))
    doc["F"] = [["1", "0"]]
    with pytest.raises(ParseError):
        window_from_json(loads(json.dumps(doc)))
    doc = window_to_json(standard("Z/p", 2))
    doc["torsion"] = 2
    with pytest.raises(ParseError):
        window_from_json(loads(json.dumps(doc)))


def test_integer_shorthand():
    doc = {"schemaVersion": 1, "kind": "window", "ring": {"p": 2, "f": 1, "N": 1},
           "divisors": [1], "torsion": 1, "F": [[1]], "V": [[0]]}
    w = window_from_json(loads(json.dumps(doc)))
    assert windows_equal(w, standard("mu_p", 2))


def test_dumps_is_canonical():
    doc = window_to_json(standard("alpha_p", 3))
    text = dumps(doc)
    assert text.endswith("\n")
    assert dumps(json.loads(text)) == text
    assert list(json.loads(text)) == sorted(doc)


def test_missing_file():
    with pytest.raises(ParseError, match="cannot read"):
        load("/nonexistent/window.json")


def test_shipped_fixtures_regenerate_identically():
    docs = build_fixture_documents()
    paths = fixture_paths()
    names = [os.path.basename(str(p)) for p in paths]
    assert sorted(names) == sorted(docs)
    for path, name in zip(paths, names):
        with open(path, encoding="utf-8") as fh:
            assert fh.read() == dumps(docs[name]), name


def test_shipped_fixtures_check_clean():
    for path in fixture_paths():
        assert check_fixture(path) == []


def test_corrupted_fixture_is_detected(tmp_path):
    src = default_directory().joinpath("window_mu_2.json")
    doc = json.loads(src.read_text(encoding="utf-8"))
    doc["expected"]["dim"] = 0
    bad = tmp_path / "window_mu_2.json"
    bad.write_text(dumps(doc), encoding="utf-8")
    msgs = check_fixture(bad)
    assert len(msgs) == 1 and "dim" in msgs[0]
    bad.write_text("{", encoding="utf-8")
    assert check_fixture(bad)[0].startswith("window_mu_2.json: parse-error")
