"""
CSV and JSON report writers, sweep summaries and gap-histogram data.
"""

import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, TextIO, Union

import numpy as np
import pandas as pd

from ..analysis.verify import FAIL, FINDING, INDETERMINATE, NOT_APPLICABLE, PASS, VerificationReport
from .sampling import PRNG_ALGORITHM

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["inequality_id", "dims", "measure", "lhs", "rhs_total", "gap", "tol", "verdict", "seed",
               "input_digest"]
FLOAT_FORMAT = "%.17g"
HISTOGRAM_BINS = 20

PathOrBuffer = Union[str, Path, TextIO]


def reports_to_frame(reports: Sequence[VerificationReport]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in reports], columns=CSV_COLUMNS)


def summarize(reports: Sequence[VerificationReport]) -> pd.DataFrame:
    """Per inequality id: counts by verdict and gap statistics"""
    frame = reports_to_frame(reports)
    rows = []
    for inequality_id, group in frame.groupby("inequality_id", sort=False):
        counts = group["verdict"].value_counts()
        rows.append({
            "inequality_id": inequality_id,
            "n": len(group),
            "min_gap": group["gap"].min(),
            "mean_gap": group["gap"].mean(),
            "max_abs_gap": group["gap"].abs().max(),
            PASS: int(counts.get(PASS, 0)),
            "violations": int(counts.get(FAIL, 0)),
            "findings": int(counts.get(FINDING, 0)),
            INDETERMINATE: int(counts.get(INDETERMINATE, 0)),
            NOT_APPLICABLE: int(counts.get(NOT_APPLICABLE, 0)),
        })
    return pd.DataFrame(rows)


def _summary_block(summary: pd.DataFrame) -> str:
    lines = ["# summary"]
    for record in summary.to_dict(orient="records"):
        fields = []
        for key, value in record.items():
            if isinstance(value, (float, np.floating)):
                value = FLOAT_FORMAT % value
            fields.append(f"{key}={value}")
        lines.append("# " + " ".join(fields))
    return "\n".join(lines) + "\n"


def _open(target: PathOrBuffer):
    if hasattr(target, "write"):
        return target, False
    path = Path(target)
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline=""), True


def write_csv(reports: Sequence[VerificationReport], target: PathOrBuffer, summary: bool = True):
    """One row per report, then a commented summary block

    Floats are written with 17 significant digits so identical runs produce
    identical files.
    """
    handle, owned = _open(target)
    try:
        reports_to_frame(reports).to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        if summary and reports:
            handle.write(_summary_block(summarize(reports)))
    finally:
        if owned:
            handle.close()


def _json_default(value: Any):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dump_json(payload: Dict[str, Any], target: PathOrBuffer):
    handle, owned = _open(target)
    try:
        json.dump(payload, handle, indent=2, default=_json_default)
        handle.write("\n")
    finally:
        if owned:
            handle.close()


def write_json(reports: Sequence[VerificationReport], target: PathOrBuffer,
               config: Optional[Dict[str, Any]] = None):
    """Drill-down report: effective config, per-report terms and extras, summary"""
    payload = {
        "prng": PRNG_ALGORITHM,
        "config": config or {},
        "reports": [r.to_dict() for r in reports],
        "summary": summarize(reports).to_dict(orient="records") if reports else [],
    }
    dump_json(payload, target)


def histogram_data(reports: Sequence[VerificationReport], bins: int = HISTOGRAM_BINS) -> pd.DataFrame:
    """Gap histogram per inequality id as plain columns"""
    frame = reports_to_frame(reports)
    parts = []
    for inequality_id, group in frame.groupby("inequality_id", sort=False):
        counts, edges = np.histogram(group["gap"].to_numpy(dtype=float), bins=bins)
        parts.append(pd.DataFrame({
            "inequality_id": inequality_id,
            "bin_left": edges[:-1],
            "bin_right": edges[1:],
            "count": counts,
        }))
    if not parts:
        return pd.DataFrame(columns=["inequality_id", "bin_left", "bin_right", "count"])
    return pd.concat(parts, ignore_index=True)


def histogram_path(output: Union[str, Path]) -> Path:
    output = Path(output)
    return output.with_name(output.stem + ".hist.csv")


def write_histogram(reports: Sequence[VerificationReport], target: PathOrBuffer, bins: int = HISTOGRAM_BINS):
    handle, owned = _open(target)
    try:
        histogram_data(reports, bins).to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    finally:
        if owned:
            handle.close()


def render_reports(reports: Sequence[VerificationReport], fmt: str = "csv",
                   config: Optional[Dict[str, Any]] = None) -> str:
    buffer = io.StringIO()
    if fmt == "json":
        write_json(reports, buffer, config)
    else:
        write_csv(reports, buffer)
    return buffer.getvalue()


def exit_code(reports: Sequence[VerificationReport]) -> int:
    """0 when nothing failed, 1 on any fail or finding"""
    return 1 if any(r.is_violation for r in reports) else 0
