import time
from typing import Any

from ..core.logging_config import workflow_logger
from ..core.validation import ChannelSection
from ..quantum.protocol import Channel, Dephasing, Depolarizing, LocalZ, apply_channel
from .state import ScenarioState


def to_channel(section: ChannelSection) -> Channel:
    if section.kind == "dephasing":
        return Dephasing(tuple(section.gammas or ()))
    if section.kind == "depolarizing":
        return Depolarizing(float(section.p or 0.0))
    return LocalZ(tuple(section.angles or ()))


def noise_channels_node(state: ScenarioState) -> dict[str, Any]:
    scenario = state["scenario"]
    workflow_logger.log_task_start("noise_channels", scenario=scenario.name, channels=len(scenario.channels))
    start = time.perf_counter()

    rho = state["rho"]
    for section in scenario.channels:
        rho = apply_channel(rho, to_channel(section))

    workflow_logger.log_task_end("noise_channels", True, duration=time.perf_counter() - start)
    return {
        "rho": rho,
        "current_step": "noise_channels",
        "noise_status": "completed",
        "messages": [f"applied {len(scenario.channels)} channel(s)"],
    }
