import time
from typing import Any

import numpy as np

from ..core.exceptions import InvalidSubspace
from ..core.logging_config import workflow_logger
from ..quantum.reconstruct import (
    Schedule,
    appendix_c_schedule,
    assemble,
    bell_schedule,
    hhcp_system,
    phase_sweep_schedule,
    simulate_fidelities,
    simulate_hhcp,
    solve,
)
from ..quantum.states import SubspaceSpec
from ..utils.seeding import derive_rng
from .state import ScenarioState


def _fidelity_schedule(name: str, spec: SubspaceSpec, points: int) -> Schedule:
    if name == "bell":
        return bell_schedule(spec)
    if name == "appendix_c":
        return appendix_c_schedule(spec)
    return phase_sweep_schedule(spec, np.linspace(0.0, 2 * np.pi, points, endpoint=False))


def protocol_simulation_node(state: ScenarioState) -> dict[str, Any]:
    """Simulate the [protocol] measurements and reconstruct coherences; skipped for exact."""
    scenario = state["scenario"]
    protocol = scenario.protocol
    spec, rho, shots = state["spec"], state["rho"], state["shots"]

    if protocol.schedule == "exact":
        return {
            "schedule": None,
            "reconstruction": None,
            "current_step": "protocol_simulation",
            "simulation_status": "skipped",
            "messages": ["exact analysis, no measurement simulated"],
        }

    workflow_logger.log_task_start("protocol_simulation", scenario=scenario.name, schedule=protocol.schedule, shots=shots)
    start = time.perf_counter()
    rng = derive_rng(state["seed"], 1)

    if protocol.schedule == "hhcp":
        if spec.d != 2 or spec.n != 2:
            raise InvalidSubspace("HHCP readout needs the two-qubit Bell subspace", details={"d": spec.d, "n": spec.n})
        zz, signals = simulate_hhcp(rho, protocol.coupling_d, shots, rng)
        result = solve(hhcp_system(zz, signals))
        schedule = None
        measurements = [zz, *signals]
        sigmas: list[float] = []
    else:
        schedule = _fidelity_schedule(protocol.schedule, spec, protocol.sweep_points)
        values, errors = simulate_fidelities(rho, spec, schedule, shots, rng)
        sigma_arg = errors if shots != float("inf") else None
        result = solve(assemble(spec, schedule, values, sigma_arg))
        measurements = values.tolist()
        sigmas = errors.tolist()

    duration = time.perf_counter() - start
    workflow_logger.log_task_end(
        "protocol_simulation",
        True,
        duration=duration,
        residual=result.residual_norm,
        condition_number=result.condition_number,
    )
    return {
        "schedule": schedule,
        "measurements": measurements,
        "sigmas": sigmas,
        "reconstruction": result,
        "current_step": "protocol_simulation",
        "simulation_status": "completed",
        "messages": [f"{protocol.schedule} protocol: {len(measurements)} measurement(s)"],
    }
