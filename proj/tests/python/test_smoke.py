import json
import pathlib

import pytest

import fedosov

GEOMETRIES = pathlib.Path(__file__).resolve().parents[2] / "tools" / "geometries"


def rows(dump):
    return [r for r in dump.rows if r[0] != "valid_order"]


def by_label(report):
    return {d.label: d for d in report.dumps}


def test_flat_star_is_moyal_to_first_order():
    r = fedosov.star(GEOMETRIES / "flat.json", "q", "p", order=1)
    assert r.passed
    d = by_label(r)
    assert rows(d["hbar^0"]) == [("q*p", "1")]
    assert rows(d["hbar^1"]) == [("1", "1/2*i")]


def test_geometry_from_dict_matches_file():
    text = (GEOMETRIES / "flat.json").read_text()
    a = fedosov.geometry(json.loads(text))
    b = fedosov.geometry(GEOMETRIES / "flat.json")
    assert a.digest() == b.digest()
    assert a.kind == "flat"


def test_validate_reports_broken_connection():
    assert fedosov.validate(GEOMETRIES / "sphere.json").passed
    broken = fedosov.validate(GEOMETRIES / "broken_gamma.json")
    assert not broken.passed
    assert any(not c.passed and "(1,1,2)" in c.detail for c in broken.checks)


def test_quantize_kinetic_energy_on_sphere():
    r = fedosov.quantize(GEOMETRIES / "sphere.json", "g(p, p)")
    assert r.passed
    assert any("Delta - R/4" in c.name for c in r.checks)


def test_check_suite_and_json():
    r = fedosov.check("kinetic-alpha", GEOMETRIES / "sphere.json", order=2)
    assert r.passed
    d = fedosov.report_dict(r)
    assert d["checks"][0]["detail"] == "alpha = 1/4"
    assert "moyal-flat" in fedosov.suite_names()


def test_input_errors_raise():
    with pytest.raises(fedosov.InputError):
        fedosov.star(GEOMETRIES / "flat.json", "q +", "p")
    with pytest.raises(fedosov.InputError, match="/kind"):
        fedosov.geometry({"kind": "torus", "n": 1, "order": 3})
    with pytest.raises(fedosov.FedosovError):
        fedosov.check("no-such-suite")
