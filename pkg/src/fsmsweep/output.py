"""CSV and manifest writers.

Column layouts are versioned and frozen: downstream consumers parse these
files by name, so renames are breaking changes. Floats are written with 17
significant digits (round-trip exact), absent values as empty cells, and
every file lands atomically via a temp file in the same directory. Nothing
here depends on wall-clock time, so a rerun with the same config is
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import os
import platform
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .engine import CurvePoint, ReplicationRecord
from .oracle import ExactCurve
from .selection import SelectionResult

RECORDS_SCHEMA = "fsmsweep records v1"
CURVES_SCHEMA = "fsmsweep curves v1"
SELECTION_SCHEMA = "fsmsweep selection v1"
ORACLE_SCHEMA = "fsmsweep oracle v1"

RECORD_COLUMNS = (
    "scenario",
    "n",
    "design",
    "epsilon",
    "replication_index",
    "status",
    "attempts",
    "achieved_asmd",
    "tau_hat",
    "neyman_var",
)

CURVE_COLUMNS = (
    "scenario",
    "n",
    "epsilon",
    "split",
    "design",
    "asmd_mean",
    "asmd_se",
    "bias",
    "variance",
    "mse",
    "mse_se",
    "accept_prob_single",
    "accept_prob_single_se",
    "accept_within_attempts",
    "exhaustion_rate",
    "avg_neyman_var",
    "vrr",
    "vrr_se",
    "r_effective",
)

SELECTION_COLUMNS = (
    "scenario",
    "n",
    "rule",
    "min_accept",
    "epsilon_star",
    "train_mse",
    "test_mse",
    "test_mse_se",
    "test_asmd",
    "test_accept_within_attempts",
    "feasible_band_lo",
    "feasible_band_hi",
)

ORACLE_COLUMNS = (
    "epsilon",
    "p_accept",
    "n_accepted",
    "cond_mean",
    "cond_var",
    "cond_mse",
    "ref_var_over_p",
    "mc_r",
    "mc_p_accept",
    "mc_p_se",
    "mc_cond_mse",
    "mc_cond_mse_se",
    "p_z",
    "mse_z",
)


def format_cell(value) -> str:
    """One CSV cell: empty for absent, 17 significant digits for floats."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write text then rename, so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render_csv(schema: str, columns: tuple[str, ...], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# {schema}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} cells, schema has {len(columns)}")
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def record_row(record: ReplicationRecord) -> list:
    return [
        record.scenario.kind,
        record.n,
        record.design_kind,
        record.epsilon,
        record.replication_index,
        record.status,
        record.attempts,
        record.achieved_asmd,
        record.tau_hat,
        record.neyman_var,
    ]


def write_records(path: str | Path, record_sets: list[list[ReplicationRecord]]) -> None:
    rows = [record_row(rec) for records in record_sets for rec in records]
    atomic_write_text(path, _render_csv(RECORDS_SCHEMA, RECORD_COLUMNS, rows))


def curve_row(point: CurvePoint) -> list:
    return [
        point.scenario,
        point.n,
        point.epsilon,
        point.split,
        point.design,
        point.asmd_mean,
        point.asmd_se,
        point.bias,
        point.variance,
        point.mse,
        point.mse_se,
        point.accept_prob_single,
        point.accept_prob_single_se,
        point.accept_within_attempts,
        point.exhaustion_rate,
        point.avg_neyman_var,
        point.vrr,
        point.vrr_se,
        point.r_effective,
    ]


def write_curves(path: str | Path, points: list[CurvePoint]) -> None:
    rows = [curve_row(pt) for pt in points]
    atomic_write_text(path, _render_csv(CURVES_SCHEMA, CURVE_COLUMNS, rows))


def selection_row(result: SelectionResult) -> list:
    pt = result.test_point
    band = result.feasible_band
    return [
        result.scenario,
        result.n,
        result.rule,
        result.min_accept,
        result.epsilon_star,
        result.train_mse,
        pt.mse if pt is not None else None,
        pt.mse_se if pt is not None else None,
        pt.asmd_mean if pt is not None else None,
        pt.accept_within_attempts if pt is not None else None,
        band[0] if band is not None else None,
        band[1] if band is not None else None,
    ]


def write_selection(path: str | Path, results: list[SelectionResult]) -> None:
    rows = [selection_row(res) for res in results]
    atomic_write_text(path, _render_csv(SELECTION_SCHEMA, SELECTION_COLUMNS, rows))


def write_oracle(path: str | Path, curve: ExactCurve, mc_rows: list[dict]) -> None:
    """Exact curve next to its Monte Carlo replication, one row per threshold."""
    if len(mc_rows) != len(curve.points):
        raise ValueError("mc_rows must align with curve.points")
    rows = []
    for pt, mc in zip(curve.points, mc_rows):
        rows.append(
            [
                pt.epsilon,
                pt.p_accept,
                pt.n_accepted,
                pt.cond_mean,
                pt.cond_var,
                pt.cond_mse,
                pt.ref_var_over_p,
                mc.get("mc_r"),
                mc.get("mc_p_accept"),
                mc.get("mc_p_se"),
                mc.get("mc_cond_mse"),
                mc.get("mc_cond_mse_se"),
                mc.get("p_z"),
                mc.get("mse_z"),
            ]
        )
    atomic_write_text(path, _render_csv(ORACLE_SCHEMA, ORACLE_COLUMNS, rows))


def write_manifest(path: str | Path, config_dict: dict, extra: dict | None = None) -> None:
    """Reproducibility manifest; deliberately free of timestamps."""
    payload = {
        "artifact": "fsmsweep",
        "version": __version__,
        "schemas": {
            "curves": CURVES_SCHEMA,
            "selection": SELECTION_SCHEMA,
            "oracle": ORACLE_SCHEMA,
        },
        "config": config_dict,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    if extra:
        payload.update(extra)
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
