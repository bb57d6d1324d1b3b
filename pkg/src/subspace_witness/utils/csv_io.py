"""
CSV artefact IO.

Comma separated, '.' decimal, header row; metadata as '# key: value' lines before the header.
Writes go to a temporary file and are moved into place with os.replace.
"""
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ..core.config import config
from ..core.exceptions import ValidationException
from ..core.logging_config import get_logger
from ..quantum.reconstruct import Schedule
from ..quantum.states import PhaseSetting

logger = get_logger(__name__)


def write_csv(frame: pd.DataFrame, path: str | Path, metadata: dict[str, Any] | None = None) -> Path:
    """Atomic CSV write with a comment header"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)

    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            for key, value in (metadata or {}).items():
                handle.write(f"# {key}: {value}\n")
            frame.to_csv(handle, index=False, float_format=config.output.float_format, lineterminator="\n")
        os.replace(tmp_name, target)
    except BaseException:
        # remove the temporary file on failure
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise

    logger.debug("CSV written", path=str(target), rows=len(frame))
    return target


def read_metadata(path: str | Path) -> dict[str, str]:
    """Read the '# key: value' header"""
    meta: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            meta[key.strip()] = value.strip()
    return meta


def read_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def write_measurements(
    path: str | Path,
    schedule: Schedule,
    fidelities: np.ndarray,
    metadata: dict[str, Any] | None = None,
) -> Path:
    """Measurement file: setting_index, theta_1..theta_n, fidelity"""
    frame = schedule.to_frame()
    frame["fidelity"] = np.asarray(fidelities, dtype=float)
    return write_csv(frame, path, metadata)


def read_measurements(path: str | Path, n: int) -> tuple[Schedule, np.ndarray]:
    """Read a measurement file back into a schedule"""
    frame = read_csv(path)
    expected = ["setting_index", *[f"theta_{m + 1}" for m in range(n)], "fidelity"]
    missing = [col for col in expected if col not in frame.columns]
    if missing:
        raise ValidationException(
            f"measurement file lacks columns: {', '.join(missing)}",
            error_code="MEASUREMENT_COLUMNS",
            details={"path": str(path), "missing": missing},
        )
    frame = frame.sort_values("setting_index")
    thetas = frame[expected[1:-1]].to_numpy(dtype=float)
    settings = tuple(PhaseSetting(tuple(row.tolist())) for row in thetas)
    return Schedule(settings, "mixed"), frame["fidelity"].to_numpy(dtype=float)
