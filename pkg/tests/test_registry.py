import copy

import pytest

from sfreg import registry
from sfreg.errors import UnknownId

IDS = [e["id"] for e in registry.list_examples()]


def test_list_examples():
    assert len(IDS) == 11
    assert IDS == sorted(IDS)
    assert {"4.1-sewing-omega3", "4.2-cusp-sliding", "4.3-vi-foldfold-1",
            "4.4-nonlinear-pitchfork"} <= set(IDS)
    for e in registry.list_examples():
        assert e["kind"] in ("linear", "nonlinear") and e["description"]


@pytest.mark.parametrize("example_id", IDS)
def test_record_verifies(example_id):
    rep = registry.verify(example_id)
    assert rep.passed, rep.failures()
    assert rep.blowup_match is not False
    assert rep.to_json()["pass"]


def test_sweeps_cover_five_parameter_values():
    rec = registry.load("4.2-cusp-sliding")
    assert len(rec.param_sets()) == 5


def test_unknown_id():
    with pytest.raises(UnknownId):
        registry.load("no-such-example")


def test_corrupted_blowup_coefficient_is_reported():
    obj = copy.deepcopy(registry.load("4.1-sewing-omega3").to_json())
    obj["expected_blowup"]["f"] = "-3*x/4 + 3*x^2 + x^3/4 - 5*x^4/2"
    rep = registry.verify_record(obj)
    assert not rep.passed and rep.blowup_match is False
    detail = [c for c in rep.failures() if c["name"].startswith("blowup")][0]["detail"]
    assert detail == ["f x^4: expected -5/2, computed -3/2"]


def test_corrupted_phi_is_reported():
    obj = copy.deepcopy(registry.load("4.4-nonlinear-pitchfork").to_json())
    obj["expected_phi"] = "-t^5/2 + t^3/2 + 2*t"
    rep = registry.verify_record(obj)
    detail = [c for c in rep.failures() if c["name"].startswith("phi")][0]["detail"]
    assert detail == ["t^1: expected 2, computed 1"]


def test_wrong_verdict_is_reported():
    obj = copy.deepcopy(registry.load("4.4-nonlinear-pitchfork").to_json())
    obj["expected"][0]["verdict"] = "sf_fold"
    rep = registry.verify_record(obj)
    bad = rep.failures()
    assert len(bad) == 2
    assert all("computed sf_pitchfork" in c["detail"] for c in bad)


def test_point_off_critical_set():
    obj = copy.deepcopy(registry.load("4.1-sewing-omega3").to_json())
    obj["expected"] = [{"point": ["1/2", "0"], "verdict": "normally_hyperbolic", "methods": ["generic"]}]
    rep = registry.verify_record(obj)
    assert rep.failures()[0]["detail"] == "expected normally_hyperbolic, computed off_critical_set"
