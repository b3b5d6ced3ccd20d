import json

import pytest

from msl.boolops import conjunction, parity
from msl.constructions import Poset, build_alternation_family
from msl.formula import parse
from msl.fsg import tree_from_formula, verify_closed_tree, formula_from_tree
from msl.io import (SCHEMA, FormatError, emit_report, format_table, load_json, model_from_json, model_to_json,
                    named_boolean, pointed_models_from_json, poset_from_json, poset_to_json, registry_from_json,
                    registry_to_json, tree_from_json, tree_to_json)
from msl.langops import FiniteLanguage, alt_language


def test_model_roundtrip():
    fam = build_alternation_family(2, 2)
    for m in (fam.a_model, *fam.b_models.values()):
        back = model_from_json(json.dumps(model_to_json(m)))
        assert back == m and back.name == m.name


def test_model_errors():
    with pytest.raises(FormatError):
        model_from_json({"worlds": ["a"]})
    with pytest.raises(FormatError, match="unknown world"):
        model_from_json({"worlds": ["a"], "relations": [[["a", "b"]]]})
    with pytest.raises(FormatError, match="n is 2"):
        model_from_json({"n": 2, "worlds": ["a"], "relations": [[]]})
    with pytest.raises(FormatError):
        load_json("{not json")


def test_pointed_models(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"worlds": ["a", "b"], "relations": [[["a", "b"]]], "points": ["a", "b"]}))
    pms = pointed_models_from_json(str(path))
    assert [pm.point for pm in pms] == ["a", "b"]
    with pytest.raises(FormatError):
        pointed_models_from_json({"worlds": ["a"], "relations": [[]], "points": ["z"]})


def test_named_booleans():
    assert named_boolean("and12", 2) == conjunction((1, 2), 2)
    assert named_boolean("xor13", 3) == parity((1, 3), 3)
    with pytest.raises(FormatError):
        named_boolean("nand12", 2)
    with pytest.raises(FormatError):
        named_boolean("r12", 2)


def test_registry_roundtrip():
    reg = registry_from_json({"n": 2, "ops": {"r1": "r1", "g": {"kind": "bool", "bits": "0110"},
                                              "L": {"kind": "lang", "words": ["12", "1"]},
                                              "A3": {"kind": "alt", "ell": 3}}})
    assert reg["L"] == FiniteLanguage.of(2, ["1", "12"])
    assert reg["A3"] == alt_language(3)
    assert registry_from_json(registry_to_json(reg)).keys() == reg.keys()
    assert all(registry_from_json(registry_to_json(reg))[k] == reg[k] for k in reg)
    with pytest.raises(FormatError):
        registry_from_json({"n": 2, "ops": {"x": {"kind": "weird"}}})
    with pytest.raises(FormatError):
        registry_from_json({"n": 3, "ops": {"A1": {"kind": "alt", "ell": 1}}})


def test_poset_roundtrip():
    p = Poset.build(["a", "b", "c"], [("a", "b")])
    assert poset_from_json(poset_to_json(p)) == p
    with pytest.raises(ValueError):
        poset_from_json({"elements": ["a", "b"], "leq": [["a", "b"], ["b", "a"]]})


def test_tree_roundtrip():
    fam = build_alternation_family(1, 2)
    tree = tree_from_formula(parse("[A1][A1]p"), fam.a_class, fam.b_class, fam.registry())
    data = json.loads(json.dumps(tree_to_json(tree)))
    assert data["schema"] == SCHEMA
    back = tree_from_json(data)
    assert verify_closed_tree(back) is None
    assert formula_from_tree(back) == parse("[A1][A1]p")
    assert back.root.shape() == tree.root.shape()
    with pytest.raises(FormatError):
        tree_from_json({"models": {}})


def test_report_rendering():
    report = {"formula": parse("[g]p"), "rows": [{"i": 1, "size": 9}, {"i": 2, "size": 12}]}
    out = json.loads(emit_report(report, "json"))
    assert list(out) == ["schema", "formula", "rows"] and out["formula"] == "[g]p"
    text = emit_report(report, "text")
    assert "formula: [g]p" in text
    assert "  i  size" in text
    with pytest.raises(ValueError):
        emit_report(report, "yaml")
    assert format_table([{"a": 1, "bb": 22}]) == ["a  bb", "1  22"]
