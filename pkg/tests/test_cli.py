import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from treeconf.cli import main
from treeconf.scenario import Scenario, ScenarioError, parse_oracle, run_scenario

SCENARIOS = Path(__file__).resolve().parents[1] / "scripts" / "scenarios"


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, list(args), catch_exceptions=False)


def test_group_list_and_check(runner):
    res = invoke(runner, "group", "list")
    assert res.exit_code == 0 and "grigorchuk" in res.output
    res = invoke(runner, "group", "check", "--group", "adding_machine")
    data = json.loads(res.stdout)
    assert data["generators"]["a"]["order"] is None and data["nucleus_size"] == 3


def test_schreier_dot(runner, tmp_path):
    out = tmp_path / "s.dot"
    res = invoke(runner, "schreier", "--level", "3", "--out", str(out))
    assert res.exit_code == 0
    assert out.read_text().count("->") == 32


def test_growth_reports_degree(runner):
    res = invoke(runner, "growth", "--radius", "64", "--up-to", "32")
    assert res.exit_code == 0
    assert res.stdout.splitlines()[-1] == "32,65,33,33"
    assert "degree 1" in res.stderr


def test_confine_exit_codes(runner):
    assert invoke(runner, "confine", "check", "--ball", "6").exit_code == 0
    res = invoke(runner, "confine", "check", "--ball", "3", "--oracle", "words:a", "--expect", "confirmed")
    assert res.exit_code == 2 and "refuted_at(g=1, L=3)" in res.stdout
    # a refutation without an expectation is a completed task
    assert invoke(runner, "confine", "check", "--ball", "3", "--oracle", "words:a").exit_code == 0


def test_usage_errors_exit_1(runner):
    assert invoke(runner, "schreier", "--level", "-1").exit_code == 1
    assert invoke(runner, "orbital", "--radius", "3", "--ray", "(2)").exit_code == 1
    assert invoke(runner, "cayley", "--radius", "2", "--group", "nope").exit_code == 1
    assert invoke(runner, "displace", "build", "--P", "a").exit_code == 1


def test_displace_build_and_verify(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    res = invoke(runner, "displace", "build", "--group", "adding_machine", "--P", "a", "--out", str(cfg))
    assert res.exit_code == 0
    res = invoke(runner, "displace", "verify", "--group", "adding_machine", "--config", str(cfg))
    assert res.exit_code == 0 and "C4=pass" in res.stdout


def test_urs_commands(runner):
    res = invoke(runner, "urs", "fingerprint", "--level", "3")
    assert res.stdout.splitlines()[2] == "3,2,00000011,fix_level"
    assert invoke(runner, "urs", "orbit", "--level", "2", "00,01", "10,11").stdout.strip() == "same_orbit"
    assert invoke(runner, "urs", "sandwich", "--level", "3").exit_code == 0


def test_bratteli_profile(runner):
    res = invoke(runner, "bratteli", "profile", "--group", "adding_machine", "--horizon", "3")
    assert res.stdout.splitlines() == ["level,vertex,A_v", "0,0,1", "1,0,1", "2,0,1", "3,0,1"]


def test_run_scenario_writes_artifacts(runner, tmp_path):
    res = invoke(runner, "run", "--scenario", str(SCENARIOS / "growth_grigorchuk.json"), "--out", str(tmp_path))
    assert res.exit_code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["fit"]["degree"] == 1 and "R=64" in report["verdict"]
    assert (tmp_path / "growth.csv").read_text().startswith("radius,")


def test_malformed_scenarios(runner, tmp_path):
    bad = tmp_path / "bad.json"
    for body in ('{"group": "grigorchuk"}', '{"group": "grigorchuk", "task": "fly"}', "not json",
                 '{"group": "grigorchuk", "task": "growth", "budgets": {"radius": 0}}'):
        bad.write_text(body)
        assert invoke(runner, "run", "--scenario", str(bad)).exit_code == 1


def test_scenario_expectation(tmp_path):
    s = Scenario.from_dict({"group": "grigorchuk", "task": "confine", "params": {"oracle": "words:a", "P": ["a"]},
                            "budgets": {"L": 2}, "expect": "confirmed"})
    out = run_scenario(s)
    assert out.refuted and out.report["expectation"] == "violated"


def test_parse_oracle(grig):
    assert parse_oracle("point:1^inf", grig).name == "point_stabilizer((1))"
    assert parse_oracle("fixator:0,10", grig).kind == "fixator"
    assert parse_oracle("rigid:0+rigid:1", grig).contains(grig.element("d"))
    with pytest.raises(ScenarioError):
        parse_oracle("normal_closure:a", grig)
