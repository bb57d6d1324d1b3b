"""
Scenario file validation.

Pydantic models for TOML scenario files ([state], [[channels]], [protocol],
[analysis], [output]); schema failures become ConfigurationException.
"""
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .exceptions import ConfigurationException, ValidationException


class StateSection(BaseModel):
    """Initial state"""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["target", "rho_phi", "bell_mixture", "correlators", "init", "random"] = "target"
    subspace: str = Field(default="bell", description="subspace name (bell, ghz3, w4, dicke:n:k) or file path")
    phases: list[float] | None = Field(default=None, description="per-qubit phases of the target state")

    # rho_phi
    eps: float = 1.0
    theta: float = 0.0
    phi0: float = 0.0

    # bell_mixture
    population: float = 0.5
    coherence_re: float = 0.5
    coherence_im: float = 0.0

    # correlators
    zz: float = 1.0
    xx: float = 1.0
    yy: float = -1.0

    # init
    rounds: int = 1
    p1: float = 1.0
    lam: float = 0.0
    entangle: bool = True

    # random
    n: int = 2
    rank: int | None = None

    @field_validator("subspace")
    @classmethod
    def validate_subspace(cls, v: str) -> str:
        if not v or not v.strip():
            raise ValidationException("subspace name must not be empty", error_code="SUBSPACE_EMPTY")
        return v.strip()

    @field_validator("eps")
    @classmethod
    def validate_eps(cls, v: float) -> float:
        if v < 0:
            raise ValidationException(
                "eps must be non-negative",
                error_code="EPS_NEGATIVE",
                details={"eps": v},
            )
        return v

    @field_validator("rounds")
    @classmethod
    def validate_rounds(cls, v: int) -> int:
        if v < 1:
            raise ValidationException("initialisation rounds must be >= 1", error_code="ROUNDS_INVALID", details={"rounds": v})
        return v

    @field_validator("n")
    @classmethod
    def validate_n(cls, v: int) -> int:
        if not 1 <= v <= 10:
            raise ValidationException("qubit count must be within 1..10", error_code="QUBITS_OUT_OF_RANGE", details={"n": v})
        return v


class ChannelSection(BaseModel):
    """Noise channel"""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["dephasing", "depolarizing", "local_z"]
    gammas: list[float] | None = None
    p: float | None = None
    angles: list[float] | None = None

    @model_validator(mode="after")
    def validate_parameters(self) -> "ChannelSection":
        required = {"dephasing": "gammas", "depolarizing": "p", "local_z": "angles"}[self.kind]
        if getattr(self, required) is None:
            raise ValidationException(
                f"{self.kind} channel needs {required}",
                error_code="CHANNEL_PARAMETER_MISSING",
                details={"kind": self.kind, "parameter": required},
            )
        return self


class ProtocolSection(BaseModel):
    """Measurement protocol"""

    model_config = ConfigDict(extra="forbid")

    schedule: Literal["exact", "bell", "appendix_c", "hhcp", "sweep"] = "exact"
    coupling_d: float = Field(default=2 * math.pi * 1e6, description="coupling d (rad/s)")
    sweep_points: int = 36
    shots: int | Literal["inf"] = "inf"

    @field_validator("coupling_d")
    @classmethod
    def validate_coupling(cls, v: float) -> float:
        if v <= 0:
            raise ValidationException("coupling must be positive", error_code="COUPLING_INVALID", details={"coupling_d": v})
        return v

    @field_validator("shots")
    @classmethod
    def validate_shots(cls, v: int | str) -> int | str:
        if v != "inf" and int(v) < 1:
            raise ValidationException("shots must be >= 1 or inf", error_code="SHOTS_INVALID", details={"shots": v})
        return v

    @property
    def shot_count(self) -> int | float:
        return math.inf if self.shots == "inf" else int(self.shots)


class AnalysisSection(BaseModel):
    """Analysis"""

    model_config = ConfigDict(extra="forbid")

    alpha: float | None = Field(default=None, description="witness threshold; computed by alpha_separable when absent")
    mode: Literal["constrained", "magnitude-sum"] = "constrained"
    witness_phases: list[float] | None = None
    measures: bool = True

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, v: float | None) -> float | None:
        if v is not None and not 0 < v < 1:
            raise ValidationException("alpha must lie in (0, 1)", error_code="ALPHA_OUT_OF_RANGE", details={"alpha": v})
        return v


class OutputSection(BaseModel):
    """Output settings"""

    model_config = ConfigDict(extra="forbid")

    dir: str | None = None
    prefix: str = "scenario"


class Scenario(BaseModel):
    """Complete scenario"""

    model_config = ConfigDict(extra="forbid")

    name: str = "scenario"
    seed: int = 0
    state: StateSection = Field(default_factory=StateSection)
    channels: list[ChannelSection] = Field(default_factory=list)
    protocol: ProtocolSection = Field(default_factory=ProtocolSection)
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        if not 0 <= v < 2**64:
            raise ValidationException("seed must be a u64", error_code="SEED_OUT_OF_RANGE", details={"seed": v})
        return v


def parse_scenario(data: dict[str, Any]) -> Scenario:
    """Build a scenario from a dict"""
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        raise ConfigurationException(
            f"invalid scenario: {e.error_count()} errors",
            error_code="SCENARIO_INVALID",
            details={"errors": [{"loc": list(err["loc"]), "msg": err["msg"]} for err in e.errors()]},
        )


def load_scenario(path: str | Path) -> Scenario:
    """Read a TOML scenario file"""
    scenario_path = Path(path)
    if not scenario_path.exists():
        raise ConfigurationException(
            f"scenario file not found: {scenario_path}",
            error_code="SCENARIO_FILE_MISSING",
            details={"path": str(scenario_path)},
        )
    try:
        with open(scenario_path, "rb") as handle:
            data = tomllib.load(handle)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationException(
            f"cannot parse scenario file: {e}",
            error_code="SCENARIO_PARSE_ERROR",
            details={"path": str(scenario_path)},
        )
    return parse_scenario(data)
