from pathlib import Path

import pytest

from subspace_witness.core.exceptions import DimensionMismatch, InvalidSubspace
from subspace_witness.core.scenario_workflow import create_scenario_workflow, run_scenario
from subspace_witness.core.validation import parse_scenario
from subspace_witness.utils.csv_io import read_csv, read_measurements, read_metadata


def _bell_mixture(schedule: str, shots="inf", **extra):
    return parse_scenario(
        {
            "name": f"bell-{schedule}",
            "seed": 5,
            "state": {"kind": "bell_mixture", "population": 0.371, "coherence_re": 0.2, "coherence_im": 0.24},
            "protocol": {"schedule": schedule, "shots": shots},
            "analysis": {"alpha": 0.5},
            "output": {"prefix": "bell"},
            **extra,
        }
    )


@pytest.mark.integration
def test_workflow_compiles():
    app = create_scenario_workflow()
    assert hasattr(app, "invoke")


@pytest.mark.integration
def test_exact_scenario(tmp_path):
    final = run_scenario(_bell_mixture("exact"), out_dir=tmp_path)
    assert final["simulation_status"] == "skipped"
    assert final["report_status"] == "completed"
    assert len(final["messages"]) == 5
    sources = [row["source"] for row in final["reports"]]
    assert sources == ["exact", "exact"]
    assert final["reports"][1]["value"] == pytest.approx(0.5 - 0.371 - abs(0.2 + 0.24j), abs=1e-12)
    names = {Path(p).name for p in final["artifacts"]}
    assert names == {"bell_witness.csv", "bell_measures.csv"}
    frame = read_csv(tmp_path / "bell_witness.csv")
    assert list(frame.columns[:2]) == ["source", "mode"]
    assert read_metadata(tmp_path / "bell_witness.csv")["seed"] == "5"


@pytest.mark.integration
def test_bell_schedule_with_exact_fidelities(tmp_path):
    final = run_scenario(_bell_mixture("bell"), out_dir=tmp_path)
    exact, reconstructed = final["reports"][1], final["reports"][2]
    assert reconstructed["source"] == "reconstructed"
    assert reconstructed["value"] == pytest.approx(exact["value"], abs=1e-10)
    schedule, fidelities = read_measurements(tmp_path / "bell_measurements.csv", 2)
    assert len(schedule) == 3 and len(fidelities) == 3


@pytest.mark.integration
def test_finite_shots_are_seeded(tmp_path):
    scenario = _bell_mixture("bell", shots=10_000)
    run_scenario(scenario, out_dir=tmp_path / "a")
    run_scenario(scenario, out_dir=tmp_path / "b")
    run_scenario(scenario, seed=6, out_dir=tmp_path / "c")
    first = (tmp_path / "a" / "bell_measurements.csv").read_text(encoding="utf-8")
    assert first == (tmp_path / "b" / "bell_measurements.csv").read_text(encoding="utf-8")
    assert first != (tmp_path / "c" / "bell_measurements.csv").read_text(encoding="utf-8")


@pytest.mark.integration
def test_hhcp_scenario(tmp_path):
    final = run_scenario(_bell_mixture("hhcp"), out_dir=tmp_path)
    assert final["schedule"] is None
    assert final["reconstruction"].nuisance
    assert final["reports"][2]["value"] == pytest.approx(final["reports"][1]["value"], abs=1e-10)
    names = {Path(p).name for p in final["artifacts"]}
    assert "bell_reconstruction.csv" in names and "bell_measurements.csv" not in names


@pytest.mark.integration
def test_hhcp_needs_bell_subspace(tmp_path):
    scenario = parse_scenario({"state": {"subspace": "ghz3"}, "protocol": {"schedule": "hhcp"}, "analysis": {"alpha": 0.5}})
    with pytest.raises(InvalidSubspace):
        run_scenario(scenario, out_dir=tmp_path)


@pytest.mark.integration
def test_appendix_c_scenario_on_w4(tmp_path):
    scenario = parse_scenario(
        {
            "name": "w4",
            "seed": 2,
            "state": {"kind": "random", "subspace": "w4", "n": 4},
            "channels": [{"kind": "dephasing", "gammas": [0.1, 0.2, 0.0, 0.3]}],
            "protocol": {"schedule": "appendix_c"},
            "analysis": {"alpha": 0.75},
            "output": {"prefix": "w4"},
        }
    )
    final = run_scenario(scenario, out_dir=tmp_path)
    assert len(final["measurements"]) == 13
    exact, reconstructed = final["reports"][1], final["reports"][2]
    assert reconstructed["value"] == pytest.approx(exact["value"], abs=1e-8)
    assert final["measures"] == {}
    recon = read_csv(tmp_path / "w4_reconstruction.csv")
    assert recon["unknown"].iloc[0] == "P"
    assert len(recon) == 13


@pytest.mark.integration
def test_channel_dimension_errors_surface(tmp_path):
    scenario = parse_scenario({"channels": [{"kind": "local_z", "angles": [0.1]}]})
    with pytest.raises(DimensionMismatch):
        run_scenario(scenario, out_dir=tmp_path)


@pytest.mark.integration
def test_overrides_take_precedence(tmp_path):
    final = run_scenario(_bell_mixture("exact"), seed=9, mode="magnitude-sum", out_dir=tmp_path)
    assert final["seed"] == 9
    assert final["reports"][1]["mode"] == "subspace-magnitude-sum"


@pytest.mark.integration
def test_same_seed_gives_identical_files(tmp_path):
    scenario = _bell_mixture("bell", shots=5_000)
    first = run_scenario(scenario, out_dir=tmp_path / "a")
    second = run_scenario(scenario, out_dir=tmp_path / "b")
    names = sorted(Path(p).name for p in first["artifacts"])
    assert names == sorted(Path(p).name for p in second["artifacts"])
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
