import re

import pytest

from subspace_witness.cli import build_parser, main, parse_seed, parse_shots
from subspace_witness.quantum.reconstruct import bell_schedule
from subspace_witness.quantum.states import SubspaceSpec
from subspace_witness.utils.csv_io import read_csv, write_measurements


@pytest.mark.unit
def test_parse_shots_and_seed():
    assert parse_shots("inf") == float("inf")
    assert parse_shots("250") == 250
    assert parse_seed("18446744073709551615") == 2**64 - 1
    with pytest.raises(SystemExit):
        build_parser().parse_args(["alpha", "--spec", "bell", "--shots", "0"])


@pytest.mark.integration
@pytest.mark.parametrize(
    "flags",
    [["--shots", "0"], ["--shots", "many"], ["--seed", "-3"], ["--seed", str(2**64)], ["--bogus"]],
)
def test_bad_flags_exit_one(flags, capsys):
    assert main(["alpha", "--spec", "bell", *flags]) == 1
    assert "error" in capsys.readouterr().err


@pytest.mark.integration
def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "subspace-witness" in capsys.readouterr().out


@pytest.mark.integration
def test_alpha_for_bell(capsys):
    assert main(["alpha", "--spec", "bell"]) == 0
    assert "alpha = 0.5000000000" in capsys.readouterr().out


@pytest.mark.integration
def test_schedule_lists_w4_real_settings(tmp_path, capsys):
    assert main(["schedule", "--spec", "w4", "--part", "real", "--out", str(tmp_path)]) == 0
    assert capsys.readouterr().out.startswith("7 settings (real)")
    assert len(read_csv(tmp_path / "schedule_real.csv")) == 7


@pytest.mark.integration
def test_gen_writes_subspace_file(tmp_path):
    assert main(["gen", "--family", "ghz", "--n", "3", "--out", str(tmp_path)]) == 0
    spec = SubspaceSpec.load(tmp_path / "ghz3.subspace")
    assert spec.basis == ("000", "111")


@pytest.mark.integration
def test_witness_commands_with_scenario(tmp_path, capsys):
    scenario = tmp_path / "state.toml"
    scenario.write_text('[state]\nkind = "correlators"\nzz = 0.4970\nxx = 0.2142\nyy = -0.5857\n', encoding="utf-8")
    assert main(["witness", "--config", str(scenario), "--alpha", "0.5", "--out", str(tmp_path)]) == 0
    assert "W_psi = -0.074225" in capsys.readouterr().out
    assert main(["subspace-witness", "--config", str(scenario), "--alpha", "0.5", "--out", str(tmp_path)]) == 0
    assert "W_s = " in capsys.readouterr().out
    assert main(["measures", "--config", str(scenario), "--out", str(tmp_path)]) == 0
    frame = read_csv(tmp_path / "measures.csv")
    assert frame["measure"].tolist() == ["concurrence", "bound_state_witness", "bound_subspace_witness"]


@pytest.mark.integration
def test_reconstruct_from_measurement_file(tmp_path, capsys):
    path = write_measurements(tmp_path / "m.csv", bell_schedule(), [0.75, 0.5, 0.25])
    assert main(["reconstruct", "--spec", "bell", "--measurements", str(path), "--alpha", "0.5", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "P = 0.500000" in out and "W_s = -0.250000" in out
    assert (tmp_path / "reconstruction.csv").exists()


@pytest.mark.integration
def test_rank_deficient_measurements_exit_two(tmp_path, capsys):
    schedule = bell_schedule()
    path = write_measurements(tmp_path / "m.csv", schedule, [0.75, 0.5, 0.25])
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n", encoding="utf-8")
    assert main(["reconstruct", "--spec", "bell", "--measurements", str(path), "--out", str(tmp_path)]) == 2
    assert "RankDeficient" in capsys.readouterr().err


@pytest.mark.integration
def test_bad_scenario_exits_one(tmp_path, capsys):
    scenario = tmp_path / "bad.toml"
    scenario.write_text("[analysis]\nalpha = 2.0\n", encoding="utf-8")
    assert main(["run", str(scenario), "--out", str(tmp_path)]) == 1
    assert "ALPHA_OUT_OF_RANGE" in capsys.readouterr().err


@pytest.mark.integration
def test_unknown_subspace_exits_one(capsys):
    assert main(["alpha", "--spec", "ghz"]) == 1
    assert "❌" in capsys.readouterr().err


@pytest.mark.integration
def test_missing_env_file_exits_one(tmp_path):
    assert main(["alpha", "--spec", "bell", "--env-file", str(tmp_path / "none.env")]) == 1


@pytest.mark.integration
def test_run_scenario_file(tmp_path, capsys):
    scenario = tmp_path / "bell.toml"
    scenario.write_text(
        'name = "bell"\n[state]\nkind = "bell_mixture"\npopulation = 0.371\ncoherence_re = 0.3117\n'
        '[protocol]\nschedule = "bell"\n[analysis]\nalpha = 0.5\n',
        encoding="utf-8",
    )
    assert main(["run", str(scenario), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "reconstructed" in out and "-0.182700" in out
    assert (tmp_path / "scenario_witness.csv").exists()


@pytest.mark.integration
def test_decay_scan(tmp_path, capsys):
    scenario = tmp_path / "echo.toml"
    scenario.write_text('[state]\nkind = "bell_mixture"\npopulation = 0.371\ncoherence_re = 0.3117\n', encoding="utf-8")
    assert main(["decay-scan", "--config", str(scenario), "--out", str(tmp_path)]) == 0
    match = re.search(r"T2 = (\S+) s", capsys.readouterr().out)
    assert float(match.group(1)) == pytest.approx(31e-6, rel=1e-4)
    assert len(read_csv(tmp_path / "decay_scan.csv")) == 121


@pytest.mark.integration
def test_reproduce_fig2a(tmp_path, capsys):
    assert main(["reproduce", "fig2a", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "witness_exact = -0.074225" in out
    assert (tmp_path / "fig2a_summary.csv").exists()
