import json

from monofix.case_pipeline import construct_generators
from monofix.cli import dump_document, exit_code, list_classes, main, run, sweep
from monofix.coeff_field import TowerField
from monofix.config import PipelineConfig, SweepConfig
from monofix.errors import NotUnimodular, ParseError, StepInvalid
from monofix.monomial_action import parse_action_spec
from monofix.ratfunc import parse_rf

INVERSION = {"n": 3, "generators": [{"matrix": [[-1, 0, 0], [0, -1, 0], [0, 0, -1]], "coeffs": ["1", "1", "1"]}]}


def test_run_inversion():
    doc, code = run(json.dumps(INVERSION), PipelineConfig())
    assert code == 0 and doc["schema"] == 1
    assert doc["verdict"] == "Rational" and doc["class_id"]["label"] == "W5(173)"
    assert all(doc["verification"].values())
    assert {"construct_s", "verify_s"} <= set(doc["timing"])


def test_generators_reparse():
    doc, _ = run(json.dumps(INVERSION), PipelineConfig())
    field = TowerField()
    r = construct_generators(parse_action_spec(INVERSION, field))
    assert [parse_rf(s, 3, field) for s in doc["generators"]] == r.generators


def test_non_unimodular():
    spec = {"generators": [{"matrix": [[2, 0, 0], [0, 1, 0], [0, 0, 1]]}]}
    doc, code = run(json.dumps(spec), PipelineConfig())
    assert code == 2 and doc["error"] == "NotUnimodular"


def test_parse_error_position():
    doc, code = run('{"generators": [\n  {"matrix": oops}]}', PipelineConfig())
    assert code == 4 and doc["error"] == "ParseError"
    assert doc["line"] == 2


def test_strict_obstruction_exit_zero():
    spec = {"generators": [{"matrix": [[-1, 0, 0], [0, -1, 0], [0, 0, -1]], "coeffs": ["2", "3", "5"]}]}
    doc, code = run(json.dumps(spec), PipelineConfig(strict=True))
    assert code == 0 and doc["verdict"] == "NotRetractRational" and doc["generators"] == []


def test_exit_codes_are_total():
    assert exit_code("Rational") == 0
    assert exit_code("NotRetractRational") == 0
    assert exit_code("Failed") == 3
    assert exit_code(None, NotUnimodular("x")) == 2
    assert exit_code(None, ParseError("x")) == 4
    assert exit_code(None, StepInvalid(0, "x")) == 3


def test_list_classes(capsys):
    assert main(["--list-classes"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out) == 36 == len(list_classes())
    assert out[0] == {"label": "W1(173)", "abstract_group": "C2", "order": 2}


def test_sweep_small_and_deterministic():
    cfg = SweepConfig(classes=["W5(173)", "W2(174)"], trials=3, seed=9)
    a, b = sweep(cfg), sweep(cfg)
    assert dump_document(a) == dump_document(b)
    assert a["total"] == {"trials": 6, "passes": 6, "failures": 0}
    assert a["classes"]["W5(173)"]["verdicts"] == {"Rational": 3}


def test_sweep_zero_trials(capsys):
    assert main(["--sweep", "--trials", "0"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["classes"] == {} and doc["total"]["trials"] == 0


def test_sweep_unknown_label(capsys):
    assert main(["--sweep", "--classes", "W99(1)", "--trials", "1"]) == 4


def test_main_reads_file(tmp_path, capsys):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(INVERSION))
    out = tmp_path / "out.json"
    assert main(["--input", str(path), "--seed", "4", "--json-out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["seed"] == 4 and "total_s" in doc["timing"]


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("MONOFIX_SEED", "17")
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(INVERSION))
    out = tmp_path / "out.json"
    main(["--input", str(path), "--json-out", str(out)])
    assert json.loads(out.read_text())["seed"] == 17
