import math

import pytest

from subspace_witness.core.exceptions import ConfigurationException, ValidationException
from subspace_witness.core.validation import Scenario, load_scenario, parse_scenario


@pytest.mark.unit
def test_defaults():
    scenario = parse_scenario({})
    assert scenario == Scenario()
    assert scenario.state.kind == "target"
    assert scenario.state.subspace == "bell"
    assert scenario.protocol.schedule == "exact"
    assert scenario.protocol.shot_count == math.inf
    assert scenario.analysis.mode == "constrained"
    assert scenario.channels == []


@pytest.mark.unit
def test_full_scenario():
    scenario = parse_scenario(
        {
            "name": "noisy-w4",
            "seed": 11,
            "state": {"kind": "random", "subspace": " w4 ", "n": 4, "rank": 2},
            "channels": [{"kind": "dephasing", "gammas": [0.1, 0.1, 0.1, 0.1]}, {"kind": "depolarizing", "p": 0.05}],
            "protocol": {"schedule": "appendix_c", "shots": 1000},
            "analysis": {"alpha": 0.75, "mode": "magnitude-sum"},
            "output": {"prefix": "w4"},
        }
    )
    assert scenario.state.subspace == "w4"
    assert scenario.protocol.shot_count == 1000
    assert [c.kind for c in scenario.channels] == ["dephasing", "depolarizing"]


@pytest.mark.unit
@pytest.mark.parametrize(
    "data,code",
    [
        ({"analysis": {"alpha": 1.0}}, "ALPHA_OUT_OF_RANGE"),
        ({"protocol": {"shots": 0}}, "SHOTS_INVALID"),
        ({"protocol": {"coupling_d": -1.0}}, "COUPLING_INVALID"),
        ({"seed": -1}, "SEED_OUT_OF_RANGE"),
        ({"state": {"eps": -0.5}}, "EPS_NEGATIVE"),
        ({"state": {"rounds": 0}}, "ROUNDS_INVALID"),
        ({"state": {"subspace": "  "}}, "SUBSPACE_EMPTY"),
        ({"channels": [{"kind": "local_z"}]}, "CHANNEL_PARAMETER_MISSING"),
    ],
)
def test_field_rules(data, code):
    with pytest.raises(ValidationException) as info:
        parse_scenario(data)
    assert info.value.error_code == code


@pytest.mark.unit
@pytest.mark.parametrize(
    "data",
    [
        {"state": {"kind": "cat"}},
        {"protocol": {"schedule": "tomography"}},
        {"analysis": {"alpah": 0.5}},
        {"unexpected": 1},
    ],
)
def test_schema_errors_become_configuration_errors(data):
    with pytest.raises(ConfigurationException) as info:
        parse_scenario(data)
    assert info.value.error_code == "SCENARIO_INVALID"
    assert info.value.details["errors"]


@pytest.mark.unit
def test_load_scenario_from_toml(tmp_path):
    path = tmp_path / "bell.toml"
    path.write_text(
        'name = "bell"\nseed = 3\n\n[state]\nkind = "bell_mixture"\npopulation = 0.371\ncoherence_re = 0.3117\n\n'
        '[protocol]\nschedule = "bell"\nshots = "inf"\n',
        encoding="utf-8",
    )
    scenario = load_scenario(path)
    assert scenario.seed == 3
    assert scenario.state.population == pytest.approx(0.371)
    assert scenario.protocol.schedule == "bell"


@pytest.mark.unit
def test_load_scenario_errors(tmp_path):
    with pytest.raises(ConfigurationException) as info:
        load_scenario(tmp_path / "missing.toml")
    assert info.value.error_code == "SCENARIO_FILE_MISSING"
    broken = tmp_path / "broken.toml"
    broken.write_text("name = \n", encoding="utf-8")
    with pytest.raises(ConfigurationException) as info:
        load_scenario(broken)
    assert info.value.error_code == "SCENARIO_PARSE_ERROR"
