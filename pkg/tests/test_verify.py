import pytest

from ch3lab.report import reports_json
from ch3lab.verify import (CheckSpec, check_miura, claims_suite, control_suite, full_suite,
                           run_check, run_suite, specs_from_json, specs_to_json)


@pytest.mark.parametrize("spec", claims_suite(), ids=lambda s: s.id)
def test_claims_pass(spec):
    r = run_check(spec)
    assert r.status == "pass", r.residual
    assert r.id == spec.id


@pytest.mark.parametrize("spec", control_suite(), ids=lambda s: s.id)
def test_controls_fail(spec):
    assert spec.params["expect"] == "fail"
    r = run_check(spec)
    assert r.status == "fail", r.residual
    assert r.residual


def test_suite_ids_unique():
    ids = [s.id for s in full_suite() + control_suite()]
    assert len(ids) == len(set(ids))


def test_spec_json_roundtrip():
    specs = claims_suite() + control_suite()
    back = specs_from_json(specs_to_json(specs))
    assert [(s.id, s.model, s.kind, s.params) for s in back] == \
        [(s.id, s.model, s.kind, s.params) for s in specs]


def test_spec_json_accepts_bare_list():
    specs = specs_from_json('[{"id": "a", "model": "ch3", "kind": "conservation"}]')
    assert specs[0].params == {}


def test_threads_do_not_change_output():
    specs = claims_suite()[:8] + control_suite()[:3]
    a = reports_json(run_suite(specs))
    b = reports_json(run_suite(list(reversed(specs)), jobs=4))
    assert a == b


def test_errors_are_captured():
    r = run_check(CheckSpec("bad", "ch3", "skew", {"operator": "K9"}))
    assert r.status == "error"
    assert "K9" in r.residual


def test_unknown_kind_rejected_at_construction():
    with pytest.raises(ValueError, match="unknown check kind"):
        CheckSpec("bad", "ch3", "telepathy", {})


def test_miura_reports_sign():
    r = check_miura("kdv3", "E1")
    assert r.status == "pass"
    assert r.details["overall factor"] == "-1"


def test_live_callback_sees_every_report():
    seen = []
    specs = claims_suite()[:4]
    run_suite(specs, on_report=seen.append)
    assert sorted(r.id for r in seen) == sorted(s.id for s in specs)
