from pathlib import Path
from typing import Any

from langgraph.graph import END, StateGraph

from ..nodes.analysis import analysis_node
from ..nodes.noise_channels import noise_channels_node
from ..nodes.protocol_simulation import protocol_simulation_node
from ..nodes.report import report_node
from ..nodes.state import ScenarioState
from ..nodes.state_preparation import state_preparation_node
from .config import config
from .exceptions import WitnessException, WorkflowException
from .logging_config import workflow_logger
from .validation import Scenario


def create_scenario_workflow() -> Any:
    workflow = StateGraph(ScenarioState)

    workflow.add_node("state_preparation", state_preparation_node)
    workflow.add_node("noise_channels", noise_channels_node)
    workflow.add_node("protocol_simulation", protocol_simulation_node)
    workflow.add_node("analysis", analysis_node)
    workflow.add_node("report", report_node)

    workflow.add_edge("state_preparation", "noise_channels")
    workflow.add_edge("noise_channels", "protocol_simulation")
    workflow.add_edge("protocol_simulation", "analysis")
    workflow.add_edge("analysis", "report")
    workflow.add_edge("report", END)

    workflow.set_entry_point("state_preparation")

    return workflow.compile()


def run_scenario(
    scenario: Scenario,
    seed: int | None = None,
    shots: int | float | None = None,
    out_dir: str | Path | None = None,
    mode: str | None = None,
) -> dict[str, Any]:
    """Run one scenario; CLI overrides win over the scenario file."""
    resolved_out = out_dir or scenario.output.dir or config.output.output_dir
    initial_state = ScenarioState(
        scenario=scenario,
        seed=scenario.seed if seed is None else seed,
        shots=scenario.protocol.shot_count if shots is None else shots,
        mode=mode or scenario.analysis.mode,
        out_dir=str(resolved_out),
        schedule=None,
        measurements=[],
        sigmas=[],
        reconstruction=None,
        reports=[],
        measures={},
        artifacts=[],
        current_step="",
        messages=[],
        preparation_status="pending",
        noise_status="pending",
        simulation_status="pending",
        analysis_status="pending",
        report_status="pending",
    )

    app = create_scenario_workflow()
    try:
        final_state: dict[str, Any] = app.invoke(initial_state)
    except WitnessException:
        raise
    except Exception as e:
        workflow_logger.log_exception("scenario failed", e, scenario=scenario.name)
        raise WorkflowException(
            f"scenario {scenario.name} failed: {e}",
            error_code="WORKFLOW_FAILED",
            details={"scenario": scenario.name, "exception_type": type(e).__name__},
        )
    return final_state
