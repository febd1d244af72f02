import json

import pytest

from cantor_nest.cli import (
    EXIT_INDETERMINATE,
    EXIT_OK,
    EXIT_UNCERTIFIABLE,
    EXIT_VIOLATION,
    main,
)


@pytest.fixture
def files(tmp_path):
    def run(*args):
        return main([str(a) for a in args])

    assert run("build", "middle_gap", "--params", '{"s": "1/2", "levels": 10}', "--out", tmp_path / "mg.json") == 0
    assert run("build", "digit_cantor", "--params", '{"base": 16, "digits": [0, 8]}', "--out", tmp_path / "k.json") == 0
    return tmp_path, run


def _load(path):
    return json.loads(path.read_text())


def test_build_counts(files):
    tmp, run = files
    assert len(_load(tmp / "mg.json")["gaps"]) == 2 ** 10 - 1
    run("build", "dio_gapset", "--params", '{"d": 3, "q0": 2, "q_max": 2, "range": [0, 1]}', "--out", tmp / "d.json")
    assert len(_load(tmp / "d.json")["gaps"]) == 3
    run("build", "middle_gap", "--params", '{"s": "1/2", "levels": 0}', "--out", tmp / "e.json")
    assert _load(tmp / "e.json")["gaps"] == []


def test_build_errors(files, capsys):
    _, run = files
    assert run("build", "nope") == 1
    assert run("build", "middle_gap", "--params", '{"s": 3}') == 1
    assert "ValidationError" in capsys.readouterr().err


def test_analyze(files):
    tmp, run = files
    assert run("analyze", tmp / "mg.json", "--cp", "1", "--p-estimate", "--out", tmp / "a.json") == EXIT_OK
    rep = _load(tmp / "a.json")
    assert rep["schema"] == "cantor-nest/1"
    assert rep["cp"][0]["total"] == "1023/1024"
    lo, hi = rep["p_estimate"]["p_hat_float"]
    assert lo <= 0.5 <= hi
    assert run("analyze", tmp / "mg.json", "--ck", "--out", tmp / "b.json") == EXIT_UNCERTIFIABLE
    assert "uncertifiable" in _load(tmp / "b.json")
    assert run("analyze", tmp / "k.json", "--ck", "--dim", "--out", tmp / "c.json") == EXIT_OK
    assert _load(tmp / "c.json")["dimension"] == ["1/4", "1/4"]


def test_nest_exit_codes(files):
    tmp, run = files
    code = run("nest", tmp / "k.json", tmp / "mg.json", "--lam", "1/64", "--depth", "6",
               "--out", tmp / "n.json", "--csv", tmp / "n.csv")
    assert code == EXIT_OK and _load(tmp / "n.json")["report"]["verdict"] == "certified-positive"
    assert (tmp / "n.csv").read_text().startswith("set,lo,hi,lo_closed,hi_closed\n")
    assert run("nest", tmp / "k.json", tmp / "mg.json", "--lam", "1", "--depth", "3", "--out", tmp / "v.json") == EXIT_VIOLATION
    run("build", "finite", "--params", '{"parts": [["0", "1/4"]]}', "--out", tmp / "f.json")
    assert run("nest", tmp / "f.json", tmp / "mg.json", "--out", tmp / "i.json") == EXIT_INDETERMINATE
    rep = _load(tmp / "i.json")["report"]
    assert rep["x_inner"] == rep["x_outer"]


def test_reports_are_byte_identical(files):
    tmp, run = files
    for name in ("r1.json", "r2.json"):
        run("random-ce", "--i-max", "1", "--i-max", "2", "--seeds", "3", "--depth", "2", "--seed", "5", "--out", tmp / name)
    assert (tmp / "r1.json").read_bytes() == (tmp / "r2.json").read_bytes()
    assert _load(tmp / "r1.json")["non_increasing"] in (True, False)


def test_config_precedence(files):
    tmp, run = files
    (tmp / "cfg.json").write_text(json.dumps({"max_k": 8, "n_max": 4}))
    run("comb", "--config", tmp / "cfg.json", "--n-max", "3", "--out", tmp / "c.json")
    rep = _load(tmp / "c.json")
    assert rep["config"]["max_k"] == 8 and len(rep["ck"]) == 7
    assert rep["config"]["n_max"] == 3 and len(rep["card_E"]) == 3
    (tmp / "bad.json").write_text(json.dumps({"bogus": 1}))
    assert run("comb", "--config", tmp / "bad.json") == 1


def test_scan_and_dio(files):
    tmp, run = files
    assert run("scan", tmp / "k.json", tmp / "mg.json", "--grid-count", "6", "--grid-first", "1/8",
               "--out", tmp / "s.json", "--csv", tmp / "s.csv") == 0
    rows = _load(tmp / "s.json")["rows"]
    assert [float(r["theo1_bound_float"]) > 0 for r in rows] == [False] * 4 + [True] * 2
    assert run("dio", "--depth", "3", "--q-max", "12", "--out", tmp / "d.json") == 0
    rep = _load(tmp / "d.json")
    assert rep["increasing"] and rep["oracle"]["x_inner_nonempty"]
