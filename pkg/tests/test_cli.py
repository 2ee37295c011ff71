"""Tests for the command-line interface: scenario parsing, table format,
subcommand behavior and exit codes."""

import re

import pytest

from hybridcat.cli import main, parse_scenario
from hybridcat.errors import ValidationError
from hybridcat.selfcheck import CheckResult


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


BASE_SCENARIO = "t = 0.99\neta = 0.9\nalpha_f = 1.0\n"


# ---------------------------------------------------------------------------
# scenario parsing


def test_parse_scenario_basics():
    kwargs, grid = parse_scenario(
        "# comment line\n"
        "t = 0.9\n"
        "eta = 0.8  # trailing comment\n"
        "alpha_i = 0.7\n"
        "detector = onoff\n"
        "cutoff_b = 16\n"
    )
    assert kwargs == {
        "t": 0.9,
        "eta": 0.8,
        "alpha_i": 0.7,
        "detector": "onoff",
        "cutoff_b": 16,
    }
    assert grid == {}


def test_parse_scenario_lambda_maps_to_lam():
    kwargs, _ = parse_scenario("t=0.99\neta=0.5\nalpha_i=0.7\nlambda=0.022\n")
    assert kwargs["lam"] == 0.022


def test_parse_scenario_sweep_axes():
    _, grid = parse_scenario(
        BASE_SCENARIO + "sweep_eta = 0.9, 0.7\nsweep_t = 0.9,0.99\n"
    )
    assert grid == {"eta": (0.9, 0.7), "t": (0.9, 0.99)}


def test_parse_scenario_rejects_unknown_key():
    with pytest.raises(ValidationError):
        parse_scenario("t = 0.9\nvoltage = 2\n")


def test_parse_scenario_rejects_duplicates():
    with pytest.raises(ValidationError):
        parse_scenario("t = 0.9\nt = 0.95\n")


def test_parse_scenario_rejects_bad_values():
    with pytest.raises(ValidationError):
        parse_scenario("t = fast\n")
    with pytest.raises(ValidationError):
        parse_scenario("cutoff_b = 14.5\n")
    with pytest.raises(ValidationError):
        parse_scenario("just a line without equals\n")
    with pytest.raises(ValidationError):
        parse_scenario("t =\n")


# ---------------------------------------------------------------------------
# run


def test_run_prints_scalars_and_oracle(tmp_path, capsys):
    scenario = _write(tmp_path / "s.txt", BASE_SCENARIO)
    code = main(["run", "--scenario", scenario])
    out = capsys.readouterr().out
    assert code == 0
    assert "fidelity" in out
    assert "probability_total" in out
    assert "numeric/analytic ratio 0.5" in out


def test_run_spdc_notes_missing_oracle(tmp_path, capsys):
    scenario = _write(
        tmp_path / "s.txt",
        "t = 0.99\neta = 0.5\nalpha_i = 0.7\nscs_source = squeezed\n"
        "s = 0.161\npair_source = spdc\nlambda = 0.022\ndetector = onoff\n",
    )
    code = main(["run", "--scenario", scenario])
    out = capsys.readouterr().out
    assert code == 0
    assert "p_chi" in out
    assert "none" in out  # no closed form applies to this configuration


def test_run_writes_single_row_table(tmp_path, capsys):
    scenario = _write(tmp_path / "s.txt", BASE_SCENARIO)
    table = tmp_path / "row.tsv"
    assert main(["run", "--scenario", scenario, "--output", str(table)]) == 0
    capsys.readouterr()
    lines = table.read_text().splitlines()
    assert lines[0].split("\t")[0] == "fidelity"
    assert len(lines) == 2


def test_run_rejects_sweep_scenario(tmp_path, capsys):
    scenario = _write(tmp_path / "s.txt", BASE_SCENARIO + "sweep_eta = 0.7,0.9\n")
    assert main(["run", "--scenario", scenario]) == 1
    assert "sweep" in capsys.readouterr().err


def test_run_missing_file_is_invalid_input(tmp_path, capsys):
    assert main(["run", "--scenario", str(tmp_path / "nope.txt")]) == 1
    capsys.readouterr()


def test_run_truncation_failure_exit_code(tmp_path, capsys):
    scenario = _write(
        tmp_path / "s.txt", "t = 0.9\neta = 0.9\nalpha_i = 1.2\ncutoff_b = 4\n"
    )
    assert main(["run", "--scenario", scenario]) == 3
    assert "numerical failure" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# sweep


def test_sweep_requires_output(tmp_path, capsys):
    scenario = _write(tmp_path / "s.txt", BASE_SCENARIO + "sweep_eta = 0.7,0.9\n")
    assert main(["sweep", "--scenario", scenario]) == 1
    capsys.readouterr()


def test_sweep_requires_axes(tmp_path, capsys):
    scenario = _write(tmp_path / "s.txt", BASE_SCENARIO)
    out = tmp_path / "t.tsv"
    assert main(["sweep", "--scenario", scenario, "--output", str(out)]) == 1
    capsys.readouterr()


def test_sweep_table_is_byte_stable(tmp_path, capsys):
    scenario = _write(
        tmp_path / "s.txt",
        BASE_SCENARIO + "sweep_eta = 0.9, 0.7\nsweep_t = 0.99, 0.9\n",
    )
    first = tmp_path / "a.tsv"
    second = tmp_path / "b.tsv"
    assert main(["sweep", "--scenario", scenario, "--output", str(first)]) == 0
    assert (
        main(
            [
                "sweep",
                "--scenario",
                scenario,
                "--output",
                str(second),
                "--threads",
                "2",
            ]
        )
        == 0
    )
    capsys.readouterr()
    assert first.read_bytes() == second.read_bytes()
    lines = first.read_text().splitlines()
    assert len(lines) == 5
    assert lines[0].startswith("eta\tt\tfidelity")


def test_sweep_values_use_twelve_significant_digits(tmp_path, capsys):
    scenario = _write(tmp_path / "s.txt", BASE_SCENARIO + "sweep_eta = 0.9\n")
    out = tmp_path / "t.tsv"
    assert main(["sweep", "--scenario", scenario, "--output", str(out)]) == 0
    capsys.readouterr()
    row = out.read_text().splitlines()[1].split("\t")
    pattern = re.compile(r"^-?\d\.\d{11}e[+-]\d{2,3}$")
    for cell in row[:3]:
        assert pattern.match(cell), cell


def test_sweep_reports_failed_points_but_exits_zero(tmp_path, capsys):
    scenario = _write(
        tmp_path / "s.txt",
        "t = 0.9\neta = 0.9\nalpha_i = 0.6\ncutoff_b = 14\n"
        "sweep_alpha_f = 0.5, 2.4\n",
    )
    out = tmp_path / "t.tsv"
    assert main(["sweep", "--scenario", scenario, "--output", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "warning" in printed
    body = out.read_text()
    assert "error:" in body
    assert "ok" in body


# ---------------------------------------------------------------------------
# reproduce


def test_reproduce_rejects_unknown_figure(capsys):
    assert main(["reproduce", "--figure", "7"]) == 1
    capsys.readouterr()


def test_reproduce_rejects_panel_for_unpaneled_figure(capsys):
    assert main(["reproduce", "--figure", "2", "--panel", "a"]) == 1
    capsys.readouterr()


def test_reproduce_rejects_missing_panel_letter(capsys):
    assert main(["reproduce", "--figure", "4", "--panel", "c"]) == 1
    capsys.readouterr()


def test_reproduce_single_panel_grid(tmp_path, capsys):
    out = tmp_path / "grid.tsv"
    code = main(
        [
            "reproduce",
            "--figure",
            "4",
            "--panel",
            "a",
            "--output",
            str(out),
            "--threads",
            "2",
        ]
    )
    printed = capsys.readouterr().out
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 22  # header plus 3 x 7 grid
    assert "panel a" in printed
    assert "True" in printed


def test_reproduce_conversion_summary_mentions_reference(tmp_path, capsys):
    out = tmp_path / "grid.tsv"
    code = main(
        ["reproduce", "--figure", "5", "--panel", "b", "--output", str(out)]
    )
    printed = capsys.readouterr().out
    assert code == 0
    assert "reference 0.842" in printed
    assert "delta" in printed
    assert len(out.read_text().splitlines()) == 126


# ---------------------------------------------------------------------------
# selfcheck


def test_selfcheck_failure_exits_two(monkeypatch, capsys):
    fake = (
        CheckResult(
            name="bs_unitarity",
            passed=False,
            expected="identity",
            actual="off by 0.1",
            tolerance="1e-10",
        ),
    )
    monkeypatch.setattr("hybridcat.cli.run_all_checks", lambda: fake)
    assert main(["selfcheck"]) == 2
    printed = capsys.readouterr().out
    assert "FAIL bs_unitarity" in printed


def test_selfcheck_pass_exits_zero(monkeypatch, capsys):
    fake = (
        CheckResult(
            name="bs_unitarity",
            passed=True,
            expected="identity",
            actual="identity",
            tolerance="1e-10",
        ),
    )
    monkeypatch.setattr("hybridcat.cli.run_all_checks", lambda: fake)
    assert main(["selfcheck"]) == 0
    assert "PASS bs_unitarity" in capsys.readouterr().out


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    capsys.readouterr()


def test_unknown_subcommand_is_invalid_input(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    capsys.readouterr()
