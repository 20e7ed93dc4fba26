import csv
import json
from importlib import resources

import jsonschema
import pytest

from sfreg.cli import run

SCHEMA = json.loads(resources.files("sfreg").joinpath("schemas/report.schema.json").read_text())

SEWING = {"X": ["1", "0"], "Y": ["2", "0"]}
CUSP = {"X": ["-y^2 + lam", "1"], "Y": ["1", "1"], "params": {"lam": "0"}}
VI = {"X": ["2*y + lam", "1"], "Y": ["7*y", "1"], "params": {"lam": "0"}}
FOLD = {"f": "-(y + x^2)", "g": "-1"}
PITCH = {"Ztilde": ["(x + L)*y + L^3", "-1"], "X": ["(x+1)*y + 1", "-1"], "Y": ["(x-1)*y - 1", "-1"]}
OMEGA3 = {"values": [{"q": "0", "v": "3"}]}
CUSP_PHI = {"values": [{"q": "0", "v": "1"}], "derivs": [{"p": "0", "u": "0"}]}
VI_PHI = {"values": [{"q": "0", "v": "-1"}], "derivs": [{"p": "0", "u": "0"}]}
PITCH_PHI = {"expr": "-t^5/2 + t^3/2 + t"}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(obj))
        return str(path)
    return write


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    report = json.loads(out) if out.strip() else None
    if report is not None:
        jsonschema.validate(report, SCHEMA)
    return code, report


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_phi_synth(capsys, files, tmp_path):
    code, rep = invoke(capsys, "phi-synth", "--constraints", files("c", OMEGA3), "--samples", "200",
                       "--csv-dir", str(tmp_path / "out"))
    assert code == 0 and rep["ok"]
    assert rep["result"]["coefficients"] == ["3", "3/2", "-6", "-1/2", "3"]
    assert not rep["result"]["monotonic"]
    rows = read_csv(rep["result"]["csv"])
    assert rows[0] == ["t", "phi", "dphi"] and len(rows) == 201


def test_phi_synth_with_parameter(capsys, files):
    c = {"values": [{"q": "0", "v": "(1+lam)/(1-lam)"}], "derivs": [{"p": "0", "u": "0"}]}
    code, rep = invoke(capsys, "phi-synth", "--constraints", files("c", c), "--param", "lam=1/10")
    assert code == 0
    assert rep["result"]["coefficients"][0] == "11/9"
    assert rep["config"]["param"] == ["lam=1/10"]


def test_phi_analyze(capsys, files):
    code, rep = invoke(capsys, "phi-analyze", "--phi", files("p", CUSP_PHI), "--level", "1")
    assert code == 0
    cps = rep["result"]["critical_points"]
    assert [round(t, 12) for t, _ in cps] == [0.0, round(8 / 15, 12)]
    assert any(abs(r) < 1e-12 for r in rep["result"]["inverse_roots"]["roots"])


def test_sigma_classify(capsys, files):
    code, rep = invoke(capsys, "sigma-classify", "--model", files("m", VI), "--y", "0")
    assert code == 0
    assert rep["result"]["points"][0]["kind"] == "fold_fold"
    code, rep = invoke(capsys, "sigma-classify", "--model", files("m", SEWING), "--y-range", "-1", "1",
                       "--n", "5")
    assert [p["kind"] for p in rep["result"]["points"]] == ["sewing"] * 5


def test_blowup(capsys, files):
    code, rep = invoke(capsys, "blowup", "--model", files("m", SEWING), "--phi", files("p", OMEGA3))
    assert code == 0
    terms = {(c["x"], c["eps"]): c["c"] for c in rep["result"]["coefficients"]["f"]}
    assert terms == {(4, 0): "-3/2", (3, 0): "1/4", (2, 0): "3", (1, 0): "-3/4"}
    assert rep["result"]["coefficients"]["g"] == []


def test_blowup_needs_phi(capsys, files):
    code, rep = invoke(capsys, "blowup", "--model", files("m", SEWING))
    assert code == 2 and rep is None


def test_critical_set(capsys, files, tmp_path):
    code, rep = invoke(capsys, "critical-set", "--model", files("m", CUSP), "--phi", files("p", CUSP_PHI),
                       "--grid", "41", "--csv-dir", str(tmp_path))
    assert code == 0
    n = sum(len(b["points"]) for b in rep["result"]["branches"])
    rows = read_csv(rep["result"]["csv"])
    assert rows[0] == ["branch", "x", "y", "f_x", "tag"] and len(rows) == n + 1
    assert any(abs(x) < 1e-9 and abs(y) < 1e-9 for x, y in rep["result"]["non_nh_points"])


def test_critical_set_bad_window(capsys, files):
    code, _ = invoke(capsys, "critical-set", "--model", files("m", FOLD), "--window", "1", "0", "-1", "1")
    assert code == 2


def test_sf_classify_all_methods(capsys, files):
    code, rep = invoke(capsys, "sf-classify", "--model", files("m", CUSP), "--phi", files("p", CUSP_PHI),
                       "--point", "0", "0", "--method", "all")
    assert code == 0
    assert set(rep["result"]["reports"]) == {"generic", "linear"}
    assert rep["result"]["verdict"] == "sf_transcritical"
    assert rep["result"]["reports"]["linear"]["verdict"] == "sf_transcritical"


def test_sf_classify_nonlinear(capsys, files):
    code, rep = invoke(capsys, "sf-classify", "--model", files("m", PITCH), "--phi", files("p", PITCH_PHI),
                       "--point", "0", "0", "--method", "nonlinear")
    assert code == 0 and rep["result"]["verdict"] == "sf_pitchfork"


def test_sf_classify_method_mismatch(capsys, files):
    code, _ = invoke(capsys, "sf-classify", "--model", files("m", FOLD), "--point", "0", "0",
                     "--method", "linear")
    assert code == 2


def test_sf_classify_off_critical_set(capsys, files):
    code, rep = invoke(capsys, "sf-classify", "--model", files("m", FOLD), "--point", "0.5", "0")
    assert code == 1
    assert not rep["ok"] and rep["error"]["type"] == "NotOnCriticalSet"


def test_simulate(capsys, files, tmp_path):
    code, rep = invoke(capsys, "simulate", "--model", files("m", FOLD), "--start", "0.5", "0",
                       "--eps", "1e-3", "--t-end", "0.5", "--csv-dir", str(tmp_path))
    assert code == 0
    res = rep["result"]
    assert res["reason"] == "time_end" and res["end"][1] == pytest.approx(-0.5)
    assert len(read_csv(res["csv"])) == res["n_samples"] + 1


def test_simulate_section(capsys, files):
    code, rep = invoke(capsys, "simulate", "--model", files("m", FOLD), "--start", "0.5", "0",
                       "--eps", "1e-3", "--section", "horizontal", "-0.25")
    assert code == 0
    assert rep["result"]["reason"] == "section_hit"
    assert rep["result"]["end"][1] == pytest.approx(-0.25, abs=1e-10)


def test_simulate_step_failure_is_domain_error(capsys, files):
    # the repelling branch sends x to -inf in finite time
    code, rep = invoke(capsys, "simulate", "--model", files("m", FOLD), "--start", "-0.5", "0.25",
                       "--eps", "1e-3", "--t-end", "5")
    assert code == 1
    assert rep["result"]["reason"] == "step_failure"


def test_simulate_rejects_bad_eps(capsys, files):
    code, _ = invoke(capsys, "simulate", "--model", files("m", FOLD), "--start", "0", "0", "--eps", "-1")
    assert code == 2


def test_fold_scaling(capsys, files, tmp_path):
    code, rep = invoke(capsys, "fold-scaling", "--model", files("m", FOLD), "--point", "0", "0",
                       "--eps", "1e-2", "5e-3", "2e-3", "1e-3", "5e-4", "--contraction",
                       "--csv-dir", str(tmp_path))
    assert code == 0
    fit = rep["result"]["fit"]
    assert len(fit["table"]) == 5
    assert abs(fit["exponent"] - 2 / 3) < 0.1
    assert len(rep["result"]["contraction"]["table"]) == 5
    assert len(read_csv(tmp_path / "contraction.csv")) == 6


def test_fold_scaling_insufficient_samples(capsys, files):
    code, rep = invoke(capsys, "fold-scaling", "--model", files("m", FOLD), "--point", "0", "0",
                       "--eps", "1e-2", "1e-3")
    assert code == 1 and rep["error"]["type"] == "InsufficientSamples"


def test_theorem_a(capsys, files):
    code, rep = invoke(capsys, "theorem-a", "--model", files("m", VI), "--phi", files("p", VI_PHI))
    assert code == 0
    assert rep["result"]["d"]["fires"]


def test_reproduce_one(capsys):
    code, rep = invoke(capsys, "reproduce", "4.4-nonlinear-pitchfork")
    assert code == 0 and rep["result"]["pass"] and rep["result"]["blowup_match"]


def test_reproduce_usage(capsys):
    code, _ = invoke(capsys, "reproduce")
    assert code == 2


def test_reproduce_unknown(capsys):
    code, rep = invoke(capsys, "reproduce", "nope")
    assert code == 1 and rep["error"]["type"] == "UnknownId"


def test_list_examples(capsys):
    code, rep = invoke(capsys, "list-examples")
    assert code == 0 and len(rep["result"]["examples"]) == 11


def test_out_file(capsys, tmp_path):
    path = tmp_path / "report.json"
    code = run(["list-examples", "--out", str(path)])
    assert code == 0 and capsys.readouterr().out == ""
    jsonschema.validate(json.loads(path.read_text()), SCHEMA)


def test_usage_errors(capsys, tmp_path):
    assert run(["no-such-command"]) == 2
    assert run(["blowup", "--model", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["blowup", "--model", str(bad)]) == 2
    capsys.readouterr()


def test_parse_error_is_domain_error(capsys, files):
    code, rep = invoke(capsys, "blowup", "--model", files("m", {"f": "x + * y", "g": "1"}))
    assert code == 1 and rep["error"]["type"] == "ParseError"
