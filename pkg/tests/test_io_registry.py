import json
import os
from fractions import Fraction

import jsonschema
import pytest

from cantor_nest import io
from cantor_nest.constructions import REGISTRY, build, get
from cantor_nest.intervals import Interval
from cantor_nest.model import Budget, DigitCantorSpec, FiniteK, GapCantor, gaps_up_to

SAMPLES = {
    "middle_gap": {"s": "1/2", "levels": 4},
    "counterexample_kp": {"p": "1/2", "n_start": 1, "i_max": 1},
    "random_kp": {"p": "4/5", "i_range": [1, 1], "seed": 3},
    "pesin_k2": {"s": 1, "N": 3, "sum_budget": 8},
    "pesin_k3": {"M": 3, "delta": "1/3", "sum_budget": 8},
    "dio_gapset": {"d": 3, "q0": 2, "q_max": 3, "range": ["0", "1"]},
    "digit_cantor": {"base": 3, "digits": [0, 2]},
    "even_digit_K": {},
    "flagship_K": {"m": 6},
    "finite": {"parts": [["0", "1/4"], ["1/2", "1"]]},
    "cf_cantor": {"k": 2, "depth": 3},
}


def test_every_construction_has_a_sample():
    assert set(SAMPLES) == set(REGISTRY)


@pytest.mark.parametrize("name", sorted(SAMPLES))
def test_build_and_roundtrip(name, tmp_path):
    obj = build(name, SAMPLES[name])
    path = tmp_path / f"{name}.json"
    doc = io.write_set(path, obj, construction=name, params=SAMPLES[name])
    assert doc["schema"] == io.SET_SCHEMA
    back = io.read_set(path)
    if isinstance(obj, GapCantor):
        assert gaps_up_to(back) == gaps_up_to(obj)
        assert (back.tail is None) == (obj.tail is None)
    elif isinstance(obj, DigitCantorSpec):
        assert back == obj
    # writing twice gives identical bytes
    first = path.read_bytes()
    io.write_set(path, obj, construction=name, params=SAMPLES[name])
    assert path.read_bytes() == first


def test_schema_rejects_bad_params():
    with pytest.raises(jsonschema.ValidationError):
        build("middle_gap", {"s": "1/2"})
    with pytest.raises(jsonschema.ValidationError):
        build("middle_gap", {"s": "half", "levels": 3})
    with pytest.raises(KeyError):
        get("nope")


def test_anonymous_gap_file_roundtrip(tmp_path):
    gc = GapCantor.from_levels(Interval.closed(0, 1), [[Interval.open(Fraction(1, 3), Fraction(2, 3))],
                                                       [Interval.open(Fraction(1, 9), Fraction(2, 9))]])
    io.write_set(tmp_path / "g.json", gc)
    back = io.read_set(tmp_path / "g.json")
    assert list(map(list, back.levels())) == list(map(list, gc.levels()))


def test_truncated_file_keeps_histogram(tmp_path):
    gc = build("pesin_k2", {"s": 1, "N": 3, "sum_budget": 10})
    doc = io.set_to_json(gc, gap_budget=Budget(count=5))
    assert not doc["gaps_complete"] and len(doc["gaps"]) == 5
    doc["meta"].pop("construction", None)
    back = io.set_from_json(doc)
    assert back.length_histogram() == gc.length_histogram()


def test_tampered_construction_file_rejected(tmp_path):
    doc = io.set_to_json(build("middle_gap", SAMPLES["middle_gap"]), construction="middle_gap",
                         params=SAMPLES["middle_gap"])
    doc["gaps"][0][0] = "0"
    with pytest.raises(io.SetFormatError):
        io.set_from_json(doc)


def test_atomic_write_leaves_no_temp_files(tmp_path):
    io.write_json(tmp_path / "a.json", {"x": 1})
    io.write_csv(tmp_path / "a.csv", ["q"], [[Fraction(1, 3)]])
    assert sorted(os.listdir(tmp_path)) == ["a.csv", "a.json"]
    assert (tmp_path / "a.csv").read_text() == "q\n1/3\n"
    assert json.loads((tmp_path / "a.json").read_text()) == {"x": 1}
