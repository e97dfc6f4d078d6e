import io
import json

import jsonschema
import pytest

from ch3lab.cli import main
from ch3lab.report import REPORT_SCHEMA
from ch3lab.verify import claims_suite, control_suite, specs_to_json


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_list_models():
    code, out = run("list-models")
    assert code == 0
    assert out.splitlines()[0].startswith("ch3")


def test_list_models_json():
    code, out = run("list-models", "--json")
    d = json.loads(out)
    jsonschema.validate(d, REPORT_SCHEMA)
    assert [m["name"] for m in d["models"]][:3] == ["ch3", "mkdv3", "kdv3"]


def test_check_pass_and_json_schema():
    code, out = run("check", "--model", "ch3", "--kind", "zero-curvature", "--json")
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, REPORT_SCHEMA)
    assert d["reports"][0]["status"] == "pass"


def test_check_with_params():
    code, out = run("check", "--model", "mkdv3", "--kind", "jacobi",
                    "--params", '{"operator": "pencil"}')
    assert code == 0 and "1/1 passed" in out


def test_failing_check_exits_one():
    code, out = run("check", "--model", "ch3", "--kind", "conservation",
                    "--params", '{"density": "v", "flux": "v*q"}')
    assert code == 1
    assert "q_x*v" in out


@pytest.mark.parametrize("argv", [
    ["check", "--model", "nope", "--kind", "skew"],
    ["check", "--model", "ch3", "--kind", "skew"],
    ["check", "--model", "ch3", "--kind", "nonsense"],
    ["check", "--model", "ch3", "--kind", "skew", "--params", "{bad"],
    ["check", "--model", "ch3", "--kind", "skew", "--params", "[1]"],
    ["suite", "--jobs", "0"],
    ["suite", "--file", "/nonexistent/suite.json"],
    ["suite", "--bogus"],
    ["simulate", "--grid", "100"],
    ["simulate", "--dt", "0.3", "--T", "0.5"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_two(argv, capsys):
    assert run(*argv)[0] == 2
    err = capsys.readouterr().err
    assert err.startswith("ch3lab: error:")


def test_unknown_model_message(capsys):
    run("check", "--model", "nope", "--kind", "skew")
    assert "unknown model 'nope'; known: ch3" in capsys.readouterr().err


def test_suite_file_with_one_control(tmp_path):
    specs = claims_suite()[:3] + control_suite()[:1]
    f = tmp_path / "s.json"
    f.write_text(specs_to_json(specs))
    code, out = run("suite", "--file", str(f), "--jobs", "2")
    assert code == 1
    lines = [l for l in out.splitlines() if l.startswith("[")]
    assert len(lines) == 4
    assert sum(l.startswith("[FAIL") for l in lines) == 1
    assert out.strip().endswith("3/4 passed")


def test_suite_file_with_unknown_kind(tmp_path):
    f = tmp_path / "s.json"
    f.write_text('{"checks": [{"id": "x", "model": "ch3", "kind": "telepathy"}]}')
    assert run("suite", "--file", str(f))[0] == 2


def test_out_directory_and_report_roundtrip(tmp_path):
    specs = claims_suite()[:2]
    f = tmp_path / "s.json"
    f.write_text(specs_to_json(specs))
    code, _ = run("suite", "--file", str(f), "--out", str(tmp_path / "o"))
    assert code == 0
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert all("seconds" not in r for r in rep["reports"])
    man = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert set(man["timings"]) == {s.id for s in specs}
    code, out = run("report", "--file", str(tmp_path / "o" / "report.json"))
    assert code == 0 and "2/2 passed" in out


def test_report_rejects_foreign_json(tmp_path):
    f = tmp_path / "r.json"
    f.write_text('{"schema": "other/1", "reports": []}')
    assert run("report", "--file", str(f))[0] == 2


def test_simulate_writes_fields(tmp_path):
    code, out = run("simulate", "--grid", "64", "--dt", "0.01", "--T", "0.05",
                    "--out", str(tmp_path))
    assert code == 0
    for name in ("fields_initial.csv", "fields_final.csv", "report.json", "manifest.json"):
        assert (tmp_path / name).exists()
    head = (tmp_path / "fields_final.csv").read_text().splitlines()[0]
    assert head == "x,p,q,r,u,v,w"
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["numeric_config"]["N"] == 64
    assert man["numeric_config"]["kmax"] == 31


def test_transform_writes_y_fields(tmp_path):
    code, _ = run("transform", "--grid", "64", "--dt", "0.01", "--T", "0.05",
                  "--out", str(tmp_path))
    assert code in (0, 1)
    head = (tmp_path / "fields_y.csv").read_text().splitlines()[0]
    assert head.startswith("y,Q1,Q2,Q3")
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert set(man["norms"]) == {"base", "refined"}


def test_version():
    assert run("--version")[0] == 0
