import json

import pytest

from pbk0.cli import main
from pbk0.errors import ParseError, ScenarioError
from pbk0.scenario import Config, bundled_text, emit_scenario, parse_scenario, run_scenario

EULER = bundled_text("euler_p1")


def scenario(**changes):
    data = json.loads(EULER)
    data.update(changes)
    return json.dumps(data, indent=2)


def test_bundled_scenario_parses():
    s = parse_scenario(EULER)
    assert s.r == 1 and len(s.triples) == 1
    assert s.base_map.kind == "localization"
    assert str(s.base_map.source) == "k[t1]"


def test_emit_roundtrip_is_byte_identical():
    once = emit_scenario(parse_scenario(EULER))
    assert emit_scenario(parse_scenario(once)) == once


def test_r_out_of_range():
    with pytest.raises(ScenarioError, match="r out of range") as e:
        parse_scenario(scenario(r=7))
    assert e.value.field == "r" and e.value.line is not None


def test_bad_alpha_entry_reports_position():
    bad = scenario(triples={"euler": {"left": "O1", "right": "O1", "alpha": [["x0^"]]}})
    with pytest.raises(ScenarioError, match="position 3") as e:
        parse_scenario(bad)
    assert e.value.field == "triples.euler.alpha[0][0]"


@pytest.mark.parametrize(
    "changes,message",
    [
        ({"base_map": {"kind": "blowup", "source": "k[t]", "target": "k[t]"}}, "unknown base-map kind"),
        ({"tasks": [{"op": "frobnicate"}]}, "unknown operation"),
        ({"triples": {"euler": {"left": "O7", "right": "O1", "alpha": [["t"]]}}}, "O7"),
        ({"modules": {"O1": {"twists": [1, 0], "relations": [["x0"], ["x0"]]}}}, "degree"),
    ],
)
def test_validation_errors(changes, message):
    with pytest.raises(ScenarioError, match=message):
        parse_scenario(scenario(**changes))


def test_bundled_run_passes():
    rep = run_scenario(parse_scenario(EULER))
    assert rep.exit_code == 0
    text = rep.to_text()
    assert "Z_r = 0: PASS" in text and "ranks: (2, 1)" in text


def test_roundtrip_task_on_vector():
    s = parse_scenario(scenario(
        modules={"A": {"twists": [0], "relations": [], "over": "base"}},
        triples={"At": {"left": "A", "right": "A", "alpha": [["t"]]}},
        tasks=[{"op": "roundtrip_verify", "args": {"vector": [[{"triple": "At"}], []]}}],
    ))
    rep = run_scenario(s)
    t = rep.tasks[0]
    assert t.status == "PASS", t.message
    assert t.result["det_vector"] == ["t", "1"]
    assert all(t.certificates.values())


def test_empty_task_list():
    rep = run_scenario(parse_scenario(scenario(tasks=[])))
    assert rep.exit_code == 0 and rep.tasks == []
    assert rep.to_text() == "summary: 0 PASS, 0 FAIL, 0 ERROR\n"


def test_fail_and_error_exit_codes():
    failing = scenario(tasks=[{"op": "quillen_resolution", "args": {"triple": "euler"}, "expect": {"ranks": [9, 9]}}])
    assert run_scenario(parse_scenario(failing)).exit_code == 1
    erroring = scenario(
        modules={"Om": {"twists": [-1], "relations": []}},
        triples={"bad": {"left": "Om", "right": "Om", "alpha": [["t"]]}},
        tasks=[{"op": "phi_decompose", "args": {"class": [{"triple": "bad"}]}}],
    )
    rep = run_scenario(parse_scenario(erroring))
    assert rep.exit_code == 2 and rep.tasks[0].status == "ERROR"


def test_json_report_is_deterministic():
    s = parse_scenario(EULER)
    assert run_scenario(s).to_json() == run_scenario(parse_scenario(EULER)).to_json()


def test_field_override():
    s = parse_scenario(EULER, "fp:101")
    assert str(s.field) != str(parse_scenario(EULER).field)
    assert run_scenario(s, Config(field="fp:101")).exit_code == 0


# -- command line --------------------------------------------------------------------------


@pytest.fixture
def euler_file(tmp_path):
    p = tmp_path / "euler.json"
    p.write_text(EULER)
    return p


def test_main_run_text(euler_file, capsys):
    assert main(["run", "--scenario", str(euler_file)]) == 0
    assert "Z_r = 0: PASS" in capsys.readouterr().out


def test_main_run_json_to_file(euler_file, tmp_path):
    out = tmp_path / "report.json"
    assert main(["run", "--scenario", str(euler_file), "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["summary"] == {"PASS": 3, "FAIL": 0, "ERROR": 0}


def test_main_check(euler_file, capsys):
    assert main(["check", "--scenario", str(euler_file)]) == 0
    assert capsys.readouterr().out.startswith("ok: r=1")


def test_main_reports_errors(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(scenario(r=7))
    assert main(["check", "--scenario", str(p)]) == 2
    assert "r out of range" in capsys.readouterr().err
    assert main(["run", "--scenario", str(tmp_path / "missing.json")]) == 2


def test_main_corpus(capsys):
    code = main(["corpus", "--r", "1", "--seed", "0"])
    out = capsys.readouterr().out
    assert code == 0 and "0 FAIL, 0 ERROR" in out
