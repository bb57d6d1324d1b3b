import numpy as np
import pandas as pd
import pytest

from subspace_witness.core.exceptions import ValidationException
from subspace_witness.quantum.reconstruct import bell_schedule
from subspace_witness.utils.csv_io import read_csv, read_measurements, read_metadata, write_csv, write_measurements


@pytest.mark.unit
def test_metadata_block_precedes_header(tmp_path):
    frame = pd.DataFrame({"tau_s": [0.0, 1e-6], "signal": [0.6, 0.5]})
    path = write_csv(frame, tmp_path / "scan.csv", {"seed": 3, "fitted_T2_s": 3.1e-05})
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[:3] == ["# seed: 3", "# fitted_T2_s: 3.1e-05", "tau_s,signal"]
    assert read_metadata(path) == {"seed": "3", "fitted_T2_s": "3.1e-05"}
    assert read_csv(path)["signal"].tolist() == [0.6, 0.5]


@pytest.mark.unit
def test_write_is_atomic_and_repeatable(tmp_path):
    frame = pd.DataFrame({"x": np.linspace(0.0, 1.0, 5)})
    first = write_csv(frame, tmp_path / "out" / "x.csv", {"seed": 1}).read_bytes()
    second = write_csv(frame, tmp_path / "out" / "x.csv", {"seed": 1}).read_bytes()
    assert first == second
    assert [p.name for p in (tmp_path / "out").iterdir()] == ["x.csv"]


@pytest.mark.unit
def test_measurement_file_round_trip(tmp_path):
    schedule = bell_schedule()
    path = write_measurements(tmp_path / "m.csv", schedule, [0.75, 0.5, 0.25], {"seed": 0})
    restored, fidelities = read_measurements(path, 2)
    expected = np.array([s.thetas for s in schedule.settings])
    assert np.allclose([s.thetas for s in restored.settings], expected, atol=1e-11)
    assert fidelities.tolist() == [0.75, 0.5, 0.25]


@pytest.mark.unit
def test_measurement_file_needs_columns(tmp_path):
    path = write_csv(pd.DataFrame({"setting_index": [0], "fidelity": [0.5]}), tmp_path / "m.csv")
    with pytest.raises(ValidationException) as info:
        read_measurements(path, 2)
    assert info.value.error_code == "MEASUREMENT_COLUMNS"
