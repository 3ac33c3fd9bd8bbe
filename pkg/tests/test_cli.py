"""CLI surface tests: commands, outputs, exit-code contract."""

import json

import pytest
from click.testing import CliRunner

from mrlsim.cli import main

DIVIDER = """\
* divider
Vs in 0 DC 1
R1 in mid 1k
R2 mid 0 1meg
.tran 1p 10p
.end
"""

FLOATING = """\
* floating
Vs in 0 DC 1
R1 in mid 1k
R2 a b 1k
.tran 1p 10p
.end
"""


@pytest.fixture
def runner():
    return CliRunner()


def test_sim_divider_csv(runner, tmp_path):
    path = tmp_path / "div.cir"
    path.write_text(DIVIDER)
    result = runner.invoke(main, ["sim", str(path), "--out", str(tmp_path)])
    assert result.exit_code == 0
    csv = (tmp_path / "div.csv").read_text()
    assert csv.splitlines()[0] == "time,in,mid"
    last_mid = float(csv.strip().splitlines()[-1].split(",")[2])
    assert last_mid == pytest.approx(0.999000999, abs=1e-9)
    assert "mid: 0.999001" in result.output


def test_sim_vcd_output(runner, tmp_path):
    path = tmp_path / "div.cir"
    path.write_text(DIVIDER)
    result = runner.invoke(
        main, ["sim", str(path), "--out", str(tmp_path), "--format", "both"]
    )
    assert result.exit_code == 0
    vcd = (tmp_path / "div.vcd").read_text()
    assert "$enddefinitions $end" in vcd


def test_sim_parse_error_exit_2(runner, tmp_path):
    path = tmp_path / "bad.cir"
    path.write_text("* bad\nR1 a 0 oops\n.end\n")
    result = runner.invoke(main, ["sim", str(path)])
    assert result.exit_code == 2
    assert "line 2" in result.output


def test_sim_missing_file_exit_2(runner, tmp_path):
    result = runner.invoke(main, ["sim", str(tmp_path / "absent.cir")])
    assert result.exit_code == 2


def test_sim_floating_net_exit_3(runner, tmp_path):
    path = tmp_path / "float.cir"
    path.write_text(FLOATING)
    result = runner.invoke(main, ["sim", str(path)])
    assert result.exit_code == 3
    assert "a" in result.output and "b" in result.output


def test_gen_census_lines(runner):
    result = runner.invoke(main, ["gen", "xax"])
    assert result.exit_code == 0
    assert "memristors: 62" in result.output
    assert "inverter cells: 23" in result.output
    result = runner.invoke(main, ["gen", "dff"])
    assert "memristors: 16" in result.output
    assert "transistors: 14" in result.output
    result = runner.invoke(main, ["gen", "not"])
    assert "memristors: 0" in result.output
    assert "transistors: 2" in result.output


def test_gen_writes_file(runner, tmp_path):
    out = tmp_path / "xor.cir"
    result = runner.invoke(main, ["gen", "xor", "--out", str(out)])
    assert result.exit_code == 0
    assert ".subckt mrl_xor" in out.read_text()


def test_gen_unknown_block_rejected(runner):
    result = runner.invoke(main, ["gen", "alu"])
    assert result.exit_code != 0


def test_verify_xor_exit_0(runner):
    result = runner.invoke(main, ["verify", "xor", "--exhaustive"])
    assert result.exit_code == 0
    assert "verdict: PASS" in result.output
    assert "vectors: 4" in result.output


def test_verify_seed_echoed_json(runner):
    result = runner.invoke(
        main, ["verify", "and", "--random", "--seed", "7", "--json"]
    )
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["passed"] is True
    assert payload["seeds"] == [7]


def test_verify_exit_1_on_mismatch(runner, monkeypatch):
    # force a wrong oracle so the analog run cannot match
    from mrlsim import golden

    monkeypatch.setattr(golden, "eval_gate", lambda kind, inputs: 1)
    result = runner.invoke(main, ["verify", "and", "--exhaustive"])
    assert result.exit_code == 1
    assert "verdict: FAIL" in result.output
    assert "first divergence" in result.output


def test_report_text(runner):
    result = runner.invoke(main, ["report"])
    assert result.exit_code == 0
    assert "14.8%" in result.output
    assert "XAX-module [12]" in result.output
    assert "62" in result.output


def test_report_json(runner):
    result = runner.invoke(main, ["report", "--json"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["area_saving_fraction"] == (27 - 23) / 27
    rows = {r["design"]: r for r in payload["rows"]}
    assert rows["XAX-module [12]"]["cmos_inverter_cells"] == 27
    assert rows["MRL-based XAX"]["memristors"] == 62
    assert any("literature" in f for f in payload["footnotes"])


def test_env_var_override():
    # click auto_envvar_prefix wires MRLSIM_* variables to options
    runner = CliRunner()
    result = runner.invoke(
        main,
        ["verify", "and", "--random", "--json"],
        env={"MRLSIM_VERIFY_SEED": "11"},
        auto_envvar_prefix="MRLSIM",
    )
    assert result.exit_code == 0
    assert json.loads(result.output)["seeds"] == [11]
