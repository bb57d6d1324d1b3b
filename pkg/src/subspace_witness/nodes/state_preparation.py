import time
from typing import Any

import numpy as np

from ..core.logging_config import workflow_logger
from ..core.validation import StateSection
from ..quantum.protocol import entangle, init_purity
from ..quantum.qcore import DensityMatrix, random_density_matrix
from ..quantum.states import (
    PhaseSetting,
    SubspaceSpec,
    bell_mixture,
    from_correlators,
    rho_phi,
    spec_from_name,
    target_state,
)
from ..utils.seeding import derive_rng
from .state import ScenarioState


def build_initial_state(section: StateSection, spec: SubspaceSpec, rng: np.random.Generator) -> DensityMatrix:
    """Build the initial state from the [state] section."""
    if section.kind == "target":
        phases = section.phases if section.phases is not None else [0.0] * spec.n
        return target_state(spec, PhaseSetting(tuple(phases))).density()
    if section.kind == "rho_phi":
        return rho_phi(section.eps, section.theta, section.phi0)
    if section.kind == "bell_mixture":
        return bell_mixture(section.population, complex(section.coherence_re, section.coherence_im))
    if section.kind == "correlators":
        return from_correlators(section.zz, section.xx, section.yy)
    if section.kind == "init":
        rho = init_purity(section.rounds, section.p1, section.lam)
        return entangle(rho) if section.entangle else rho
    return random_density_matrix(section.n, rng, section.rank)


def state_preparation_node(state: ScenarioState) -> dict[str, Any]:
    scenario = state["scenario"]
    workflow_logger.log_task_start("state_preparation", scenario=scenario.name, seed=state["seed"])
    start = time.perf_counter()

    spec = spec_from_name(scenario.state.subspace)
    rho = build_initial_state(scenario.state, spec, derive_rng(state["seed"], 0))

    duration = time.perf_counter() - start
    workflow_logger.log_task_end("state_preparation", True, duration=duration, n=rho.n, kind=scenario.state.kind)
    return {
        "spec": spec,
        "rho_initial": rho,
        "rho": rho,
        "current_step": "state_preparation",
        "preparation_status": "completed",
        "messages": [f"prepared {scenario.state.kind} state on {rho.n} qubits"],
    }
