import operator
from typing import Annotated, Any, TypedDict

from ..core.validation import Scenario
from ..quantum.qcore import DensityMatrix
from ..quantum.reconstruct import ReconstructionResult, Schedule
from ..quantum.states import SubspaceSpec


class ScenarioState(TypedDict, total=False):
    scenario: Scenario
    seed: int
    shots: int | float
    mode: str
    out_dir: str

    spec: SubspaceSpec
    rho_initial: DensityMatrix
    rho: DensityMatrix  # after the noise channels

    schedule: Schedule | None
    measurements: list[float]
    sigmas: list[float]
    reconstruction: ReconstructionResult | None

    alpha: float
    reports: list[dict[str, Any]]  # witness rows
    measures: dict[str, float]
    artifacts: list[str]  # written CSV paths

    current_step: str
    messages: Annotated[list[str], operator.add]

    # progress tracking
    preparation_status: str
    noise_status: str
    simulation_status: str
    analysis_status: str
    report_status: str
