import json

import pytest

from ch3lab.models import (REDUCTIONS, UnknownModel, bundle_to_json, get_model, list_models,
                           model_names, reduce_model)
from ch3lab.opalg import is_skew_adjoint


def test_registry():
    assert model_names() == ["ch3", "mkdv3", "kdv3", "ch", "gx", "novikov"]
    assert [m["name"] for m in list_models()] == model_names()


def test_unknown_model():
    with pytest.raises(UnknownModel, match="registered"):
        get_model("nope")


def test_models_are_cached():
    assert get_model("ch3") is get_model("ch3")


@pytest.mark.parametrize("name", ["ch3", "mkdv3", "kdv3", "ch", "gx", "novikov"])
def test_no_undeclared_symbols(name):
    assert get_model(name).orphans() == set()


@pytest.mark.parametrize("name", ["ch3", "mkdv3", "kdv3", "ch", "gx", "novikov"])
def test_bundle_json_is_deterministic(name):
    a = bundle_to_json(get_model(name))
    assert a == bundle_to_json(get_model(name))
    d = json.loads(a)
    assert d["name"] == name


def test_ch3_layout():
    m = get_model("ch3")
    assert m.variables == ("u", "v", "w")
    assert sorted(m.operators) == ["J1", "J2"]
    assert sorted(m.functionals) == ["H0", "H1"]
    for k in ("J1", "J2"):
        assert is_skew_adjoint(m.operators[k]).status == "pass"


def test_mkdv3_layout():
    m = get_model("mkdv3")
    assert m.jet.var == "y"
    assert {"K1", "K2"} <= set(m.operators)
    assert set(m.extras["F"]) == {"F1", "F2", "F3"}


@pytest.mark.parametrize("name", sorted(REDUCTIONS))
def test_reductions_registered(name):
    m = get_model(name)
    assert json.loads(bundle_to_json(m))["parent"] == "ch3"
    assert reduce_model(get_model("ch3"), REDUCTIONS[name]).name == name


def test_reduce_model_rejects_other_constraints():
    with pytest.raises(ValueError, match="not one of"):
        reduce_model(get_model("ch3"), {"u": "1"})
