import json
import subprocess
import sys
from pathlib import Path

import pytest

from hgauge import cli
from hgauge.errors import SchemaError

GOLDEN = Path(__file__).parent / "golden"


def run(*args):
    return subprocess.run([sys.executable, "-m", "hgauge", *args], capture_output=True, text=True)


def write(tmp_path, sc, name="sc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(sc))
    return str(p)


MINIMAL = {
    "schema": 1,
    "name": "minimal",
    "crossed_module": "CM1",
    "base": {"kind": "pair", "dim": 2},
    "checks": [{"suite": "peiffer", "params": {"n_samples": 20}}],
}


def test_list_builtins_matches_golden(capsys):
    assert cli.main(["list-builtins"]) == 0
    assert capsys.readouterr().out == (GOLDEN / "list_builtins.txt").read_text()


def test_every_bundled_scenario_validates():
    for name in cli.bundled_scenarios():
        cli.load_scenario(name)


def test_exit_0_and_report_to_file(tmp_path):
    out = tmp_path / "r.json"
    r = run("run", "--scenario", write(tmp_path, MINIMAL), "--out", str(out))
    assert r.returncode == 0, r.stderr
    rep = json.loads(out.read_text())
    assert rep["pass"] and rep["suites"][0]["name"] == "peiffer"
    assert "PASS scenario minimal" in r.stdout


def test_json_to_stdout_without_out(tmp_path):
    r = run("run", "--scenario", write(tmp_path, MINIMAL))
    assert json.loads(r.stdout)["scenario"] == "minimal"
    assert "PASS peiffer" in r.stderr


def test_corrupted_peiffer_exits_1_with_label(tmp_path):
    out = tmp_path / "r.json"
    r = run("run", "--scenario", "corrupted_peiffer.json", "--out", str(out))
    assert r.returncode == 1
    assert "peiffer" in r.stderr
    suite = json.loads(out.read_text())["suites"][0]
    assert not suite["pass"]
    assert {"peiffer_1", "peiffer_2"} <= set(suite["details"]["failed"])


def test_associator_defect_names_first_failing_property(tmp_path):
    out = tmp_path / "r.json"
    r = run("run", "--scenario", "cm2_associator.json", "--suite", "coherence", "--out", str(out))
    assert r.returncode == 1
    suite = json.loads(out.read_text())["suites"][0]
    assert suite["details"]["first_failure"] == "j"


@pytest.mark.parametrize(
    "mutate",
    [
        lambda sc: sc.pop("checks"),
        lambda sc: sc.update(schema=2),
        lambda sc: sc.update(extra=1),
        lambda sc: sc["base"].update(dim="two"),
    ],
)
def test_schema_errors_exit_2(tmp_path, mutate):
    sc = json.loads(json.dumps(MINIMAL))
    mutate(sc)
    r = run("run", "--scenario", write(tmp_path, sc))
    assert r.returncode == 2
    assert "schema error" in r.stderr


def test_invalid_json_and_missing_file_exit_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run("run", "--scenario", str(p)).returncode == 2
    assert run("run", "--scenario", str(tmp_path / "nope.json")).returncode == 2


@pytest.mark.parametrize(
    "mutate",
    [
        lambda sc: sc.update(crossed_module="CM9"),
        lambda sc: sc["checks"].append({"suite": "nonexistent"}),
        lambda sc: sc.update(bundle={"mode": "decorate", "cocycle": "bogus"}),
    ],
)
def test_build_errors_exit_3(tmp_path, mutate):
    sc = json.loads(json.dumps(MINIMAL))
    mutate(sc)
    r = run("run", "--scenario", write(tmp_path, sc))
    assert r.returncode == 3, r.stderr
    assert "build error" in r.stderr


def test_reports_are_byte_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run("run", "--scenario", "so2_vb.json", "--suite", "vb", "--out", str(out)).returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_override_is_recorded(tmp_path):
    out = tmp_path / "r.json"
    run("run", "--scenario", write(tmp_path, MINIMAL), "--seed", "7", "--out", str(out))
    assert json.loads(out.read_text())["suites"][0]["details"]["seed"] == 7


def test_clean_maps_non_finite_to_strings():
    import numpy as np

    assert cli._clean({"a": np.array([1.0, np.inf]), "b": np.nan}) == {"a": [1.0, "inf"], "b": "nan"}


def test_validate_scenario_raises_schema_error():
    with pytest.raises(SchemaError):
        cli.validate_scenario({"schema": 1})
