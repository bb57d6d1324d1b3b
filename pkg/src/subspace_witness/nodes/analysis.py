import time
from typing import Any

from ..core.logging_config import workflow_logger
from ..quantum.measures import bound_from_witness, concurrence, gme_bound_ghz3
from ..quantum.reconstruct import ws_from_result
from ..quantum.states import PhaseSetting
from ..quantum.witness import alpha_separable, state_witness, subspace_witness
from .state import ScenarioState


def analysis_node(state: ScenarioState) -> dict[str, Any]:
    """State witness, subspace witness (exact and reconstructed) and entanglement measures."""
    scenario = state["scenario"]
    analysis = scenario.analysis
    spec, rho, seed, mode = state["spec"], state["rho"], state["seed"], state["mode"]
    workflow_logger.log_task_start("analysis", scenario=scenario.name, mode=mode)
    start = time.perf_counter()

    if analysis.alpha is not None:
        alpha = analysis.alpha
    else:
        estimate = alpha_separable(spec, seed=seed)
        if not estimate.converged:
            workflow_logger.warning("alpha estimate did not converge", value=estimate.value)
        alpha = estimate.value

    phases = analysis.witness_phases if analysis.witness_phases is not None else [0.0] * spec.n
    reports = [
        {"source": "exact", **state_witness(rho, spec, PhaseSetting(tuple(phases)), alpha).to_row()},
        {"source": "exact", **subspace_witness(rho, spec, alpha, mode, seed).to_row()},  # type: ignore[arg-type]
    ]
    reconstruction = state.get("reconstruction")
    if reconstruction is not None:
        reconstructed = ws_from_result(reconstruction, spec, alpha, mode, seed)  # type: ignore[arg-type]
        reports.append({"source": "reconstructed", **reconstructed.to_row()})

    measures: dict[str, float] = {}
    if analysis.measures and rho.n == 2:
        measures["concurrence"] = concurrence(rho).value
        measures["bound_state_witness"] = bound_from_witness(float(reports[0]["value"]))
        measures["bound_subspace_witness"] = bound_from_witness(float(reports[1]["value"]))
    if analysis.measures and rho.n == 3:
        measures["gme_bound_ghz3"] = gme_bound_ghz3(rho)

    workflow_logger.log_task_end("analysis", True, duration=time.perf_counter() - start, alpha=alpha)
    return {
        "alpha": alpha,
        "reports": reports,
        "measures": measures,
        "current_step": "analysis",
        "analysis_status": "completed",
        "messages": [f"analysed {len(reports)} witness row(s)"],
    }
