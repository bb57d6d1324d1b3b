import time
from pathlib import Path
from typing import Any

import pandas as pd

from ..core.config import config
from ..core.logging_config import workflow_logger
from ..utils.csv_io import write_csv, write_measurements
from .state import ScenarioState


def scenario_metadata(state: ScenarioState) -> dict[str, Any]:
    from .. import __version__

    scenario = state["scenario"]
    return {
        "tool": f"subspace-witness {__version__}",
        "scenario": scenario.name,
        "seed": state["seed"],
        "shots": state["shots"],
        "subspace": " ".join(state["spec"].basis),
        **config.to_dict(),
    }


def report_node(state: ScenarioState) -> dict[str, Any]:
    """Write witness rows, reconstruction and measures as CSV."""
    scenario = state["scenario"]
    out_dir = Path(state["out_dir"])
    prefix = scenario.output.prefix
    workflow_logger.log_task_start("report", scenario=scenario.name, out_dir=str(out_dir))
    start = time.perf_counter()

    meta = scenario_metadata(state)
    meta["alpha"] = state["alpha"]
    artifacts = [write_csv(pd.DataFrame(state["reports"]), out_dir / f"{prefix}_witness.csv", meta)]

    reconstruction = state.get("reconstruction")
    if reconstruction is not None:
        recon_meta = {
            **meta,
            "residual_norm": reconstruction.residual_norm,
            "condition_number": reconstruction.condition_number,
        }
        artifacts.append(write_csv(reconstruction.to_frame(), out_dir / f"{prefix}_reconstruction.csv", recon_meta))
    schedule = state.get("schedule")
    if schedule is not None:
        artifacts.append(
            write_measurements(out_dir / f"{prefix}_measurements.csv", schedule, state["measurements"], meta)
        )
    if state.get("measures"):
        frame = pd.DataFrame([{"measure": k, "value": v} for k, v in state["measures"].items()])
        artifacts.append(write_csv(frame, out_dir / f"{prefix}_measures.csv", meta))

    workflow_logger.log_task_end("report", True, duration=time.perf_counter() - start, files=len(artifacts))
    return {
        "artifacts": [str(p) for p in artifacts],
        "current_step": "report",
        "report_status": "completed",
        "messages": [f"wrote {len(artifacts)} file(s) to {out_dir}"],
    }
