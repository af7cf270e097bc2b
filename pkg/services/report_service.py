# ============================================================================
# File: services/report_service.py
# Description: Atomic CSV/JSON artefacts with resolved-config sidecars
# ============================================================================
"""
Report writers.

Every artefact is written to a temporary file in the target directory and
moved into place with os.replace, so readers never see partial files.
Each artefact <name> gets a <name>.meta.json sidecar holding the resolved
problem configuration.
"""

import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
import structlog

from core.boundary import Trace
from spectral.detfun import HeatmapGrid, ZeroSet
from spectral.dtn import DtnResult

logger = structlog.get_logger(__name__)


def to_jsonable(value: Any) -> Any:
    """Complex numbers become [re, im]; numpy scalars and arrays become lists."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def dumps(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), indent=2, ensure_ascii=False)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", newline="", dir=path.parent, prefix=f".{path.name}.", delete=False
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise


class ReportWriter:
    """
    Writes artefacts for one command run.

    Attributes:
        output_dir: Target directory (created on first write)
        config: Resolved problem configuration for the sidecars
        command: Subcommand name recorded in the sidecars
    """

    def __init__(self, output_dir: str, config: Dict[str, Any], command: str):
        self.output_dir = Path(output_dir)
        self.config = config
        self.command = command
        self.written: list = []

    def _sidecar(self, path: Path, extra: Optional[Dict[str, Any]] = None) -> None:
        meta = {
            "artefact": path.name,
            "command": self.command,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "config": self.config,
        }
        if extra:
            meta.update(extra)
        _atomic_write(path.with_name(path.name + ".meta.json"), dumps(meta))

    def write_json(self, name: str, payload: Any, meta: Optional[Dict[str, Any]] = None) -> Path:
        path = self.output_dir / name
        _atomic_write(path, dumps(payload))
        self._sidecar(path, meta)
        self.written.append(str(path))
        logger.info("artefact_written", path=str(path), kind="json")
        return path

    def write_frame(self, name: str, frame: pd.DataFrame, meta: Optional[Dict[str, Any]] = None) -> Path:
        path = self.output_dir / name
        _atomic_write(path, frame.to_csv(index=False, lineterminator="\r\n"))
        self._sidecar(path, {"rows": int(len(frame)), "columns": list(frame.columns), **(meta or {})})
        self.written.append(str(path))
        logger.info("artefact_written", path=str(path), kind="csv", rows=len(frame))
        return path


# ----------------------------------------------------------------------------
# Frames and payloads
# ----------------------------------------------------------------------------

def dtn_frame(result: DtnResult) -> pd.DataFrame:
    """
    One row per (mode, recovered trace) with a nonzero value.

    Resonant modes and prescribed traces have no rows, so zero data gives
    an empty table.
    """
    unknown = set(result.data.unknown_traces())
    records = []
    for n in result.solved_modes():
        for trace, value in sorted(result.solution(n).traces.items()):
            trace = Trace(*trace)
            if trace not in unknown or value == 0:
                continue
            records.append({
                "n": n,
                "trace": trace.label,
                "re": complex(value).real,
                "im": complex(value).imag,
                "min_norm": result.solution(n).min_norm,
            })
    return pd.DataFrame.from_records(records, columns=["n", "trace", "re", "im", "min_norm"])


def dtn_payload(result: DtnResult) -> Dict[str, Any]:
    modes = []
    for n, solution in sorted(result.modes.items()):
        modes.append({
            "n": n,
            "status": solution.status.value,
            "min_norm": solution.min_norm,
            "traces": {Trace(*t).label: v for t, v in sorted(solution.traces.items())},
            "diagnostics": solution.diagnostics,
        })
    return {
        "n_max": result.n_max,
        "resonant_modes": result.resonant_modes(),
        "flagged_modes": result.flagged_modes(),
        "modes": modes,
    }


def profile_frame(x: np.ndarray, values: np.ndarray) -> pd.DataFrame:
    values = np.asarray(values, dtype=complex)
    return pd.DataFrame({"x": x, "re": values.real, "im": values.imag})


def field_frame(t: np.ndarray, x: np.ndarray, values: np.ndarray) -> pd.DataFrame:
    """Long (t, x, re, im) table from a (len(t), len(x)) array."""
    values = np.asarray(values, dtype=complex)
    return pd.DataFrame({
        "t": np.repeat(t, x.size),
        "x": np.tile(x, t.size),
        "re": values.real.reshape(-1),
        "im": values.imag.reshape(-1),
    })


def heatmap_frame(grid: HeatmapGrid) -> pd.DataFrame:
    """Long (re_k, im_k, sin_arg) table, rows ordered by im_k then re_k."""
    return pd.DataFrame({
        "re_k": np.tile(grid.xs, grid.ys.size),
        "im_k": np.repeat(grid.ys, grid.xs.size),
        "sin_arg": np.asarray(grid.values, dtype=float).reshape(-1),
    })


def zeros_payload(zero_set: ZeroSet) -> Dict[str, Any]:
    return {
        "count": zero_set.count,
        "region": zero_set.region.as_list() if zero_set.region is not None else None,
        "zeros": [
            {"location": z.location, "multiplicity": z.multiplicity, "residual": z.residual}
            for z in zero_set.zeros
        ],
    }
