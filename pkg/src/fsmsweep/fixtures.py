"""Frozen small-instance fixtures and their golden exact curves.

The enumeration fixture is a fixed n=8, p=2 instance whose exact acceptance
curve was computed once and frozen with 17 significant digits (see
scripts/make_oracle_fixture.py). Engine-versus-enumeration agreement checks
and golden-value regression tests both load it from here.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .dgp import Sample, ScenarioSpec

FIXTURE_DIR = Path(__file__).parent / "fixtures"
ORACLE_FIXTURE = "oracle_n8_p2.txt"
ORACLE_GOLDEN = "oracle_n8_p2_golden.csv"

_GOLDEN_COLUMNS = (
    "epsilon",
    "p_accept",
    "n_accepted",
    "cond_mean",
    "cond_var",
    "cond_mse",
    "ref_var_over_p",
)


def fixture_path(name: str) -> Path:
    path = FIXTURE_DIR / name
    if not path.is_file():
        raise FileNotFoundError(f"missing fixture file {path}")
    return path


def load_oracle_sample() -> Sample:
    """The frozen n=8, p=2 instance (columns x1 x2 y0 y1)."""
    data = np.loadtxt(fixture_path(ORACLE_FIXTURE), comments="#")
    if data.ndim != 2 or data.shape[1] != 4:
        raise ValueError(f"fixture must have 4 columns, got shape {data.shape}")
    return Sample(
        x=np.ascontiguousarray(data[:, :2]),
        y0=np.ascontiguousarray(data[:, 2]),
        y1=np.ascontiguousarray(data[:, 3]),
        scenario=ScenarioSpec(kind="baseline", tau=1.0),
        seed=(),
    )


def load_oracle_golden() -> list[dict[str, float | int | None]]:
    """Frozen exact-curve values; empty cells parse as None."""
    rows: list[dict[str, float | int | None]] = []
    with open(fixture_path(ORACLE_GOLDEN), encoding="utf8") as handle:
        header: list[str] | None = None
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                if tuple(header) != _GOLDEN_COLUMNS:
                    raise ValueError(f"unexpected golden columns {header}")
                continue
            cells = line.split(",")
            row: dict[str, float | int | None] = {}
            for key, cell in zip(header, cells):
                if cell == "":
                    row[key] = None
                elif key == "n_accepted":
                    row[key] = int(cell)
                else:
                    row[key] = float(cell)
            rows.append(row)
    if not rows:
        raise ValueError("golden fixture has no data rows")
    return rows
