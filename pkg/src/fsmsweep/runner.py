"""Sweep orchestration: run every cell, aggregate every split, select thresholds.

One sweep covers scenarios x sample sizes x (benchmarks + threshold grid).
Records are aggregated three times per cell (all, train, test); selection
rules see only the train curve and are scored on the held-out test records.
A selection rule that cannot produce a threshold (everything infeasible, or
an unreachable acceptance floor) is skipped with a warning rather than
failing the sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .designs import DesignSpec
from .dgp import Sample, ScenarioSpec
from .engine import (
    DEFAULT_EPSILON_GRID,
    CellSpec,
    CurvePoint,
    ReplicationRecord,
    aggregate,
    default_designs,
    filter_split,
    run_cell,
    run_cells,
)
from .fixtures import load_oracle_sample
from .oracle import ExactCurve, exact_curve
from .output import (
    write_curves,
    write_manifest,
    write_oracle,
    write_records,
    write_selection,
)
from .seeding import stable_hash_int
from .selection import (
    RULE_CONSTRAINED,
    RULE_MIN_MSE,
    SelectionError,
    SelectionResult,
    evaluate_on_test,
    select_constrained,
    select_min_mse,
    split,
)

DEFAULT_ORACLE_R = 100_000
DEFAULT_ORACLE_TOL_SE = 4.0


@dataclass
class SweepResult:
    """Everything a sweep produced, keyed for downstream use."""

    config: RunConfig
    curves: list[CurvePoint] = field(default_factory=list)
    selections: list[SelectionResult] = field(default_factory=list)
    records: dict[tuple[str, int, str], list[ReplicationRecord]] = field(
        default_factory=dict
    )
    warnings: list[str] = field(default_factory=list)

    def curve(
        self, scenario: str, n: int, split_name: str = "all"
    ) -> list[CurvePoint]:
        return [
            pt
            for pt in self.curves
            if pt.scenario == scenario and pt.n == n and pt.split == split_name
        ]


def _cell_bootstrap_seed(
    master_seed: int, scenario: ScenarioSpec, n: int, design: DesignSpec, split_name: str
) -> int:
    return stable_hash_int(
        f"bootstrap-cell|{master_seed}|{scenario.code}|{n}|{design.label()}|{split_name}"
    )


def run_sweep(config: RunConfig, *, progress: bool = False) -> SweepResult:
    """Run the full sweep described by ``config``."""
    result = SweepResult(config=config)
    designs = default_designs(
        config.grid,
        rr_threshold=config.rr_threshold,
        max_attempts=config.max_attempts,
        allocation=config.allocation,
    )
    plan = split(config.r, config.split_seed)
    splits = {"all": None, "train": plan.train, "test": plan.test}
    for kind in config.scenarios:
        scenario = ScenarioSpec(kind=kind)
        for n in config.sample_sizes:
            if progress:
                print(
                    f"sweep: {kind} n={n} ({len(designs)} cells, r={config.r})",
                    flush=True,
                )
            cells = [CellSpec(scenario, n, design) for design in designs]
            per_design = run_cells(
                cells,
                config.r,
                config.master_seed,
                p=config.p,
                workers=config.workers,
                progress=progress,
            )
            for design, records in zip(designs, per_design):
                result.records[(kind, n, design.label())] = records
            cr_records = per_design[0]
            for split_name, indices in splits.items():
                base = filter_split(cr_records, indices)
                for design, records in zip(designs, per_design):
                    point = aggregate(
                        filter_split(records, indices),
                        base,
                        split=split_name,
                        bootstrap_b=config.bootstrap_b,
                        bootstrap_seed=_cell_bootstrap_seed(
                            config.master_seed, scenario, n, design, split_name
                        ),
                    )
                    result.curves.append(point)
            _select_for_cell(config, scenario, n, designs, per_design, plan, result)
    return result


def _select_for_cell(config, scenario, n, designs, per_design, plan, result) -> None:
    train_curve = result.curve(scenario.kind, n, "train")
    cr_test = filter_split(per_design[0], plan.test)
    fsm_design = {d.threshold: d for d in designs if d.kind == "fsm"}
    fsm_records = {
        d.threshold: recs for d, recs in zip(designs, per_design) if d.kind == "fsm"
    }
    jobs = [(RULE_MIN_MSE, None)]
    jobs.extend((RULE_CONSTRAINED, floor) for floor in config.min_accept)
    for rule, floor in jobs:
        try:
            if rule == RULE_MIN_MSE:
                sel = select_min_mse(train_curve)
            else:
                sel = select_constrained(train_curve, floor)
        except SelectionError as err:
            tag = f" floor={floor:g}" if floor is not None else ""
            result.warnings.append(
                f"selection skipped: {scenario.kind} n={n} rule={rule}{tag}: {err}"
            )
            continue
        design = fsm_design[sel.epsilon_star]
        evaluate_on_test(
            sel,
            filter_split(fsm_records[sel.epsilon_star], plan.test),
            cr_test,
            bootstrap_b=config.bootstrap_b,
            bootstrap_seed=_cell_bootstrap_seed(
                config.master_seed, scenario, n, design, "test"
            ),
        )
        result.selections.append(sel)


def _write_run_manifest(result: SweepResult, out: Path) -> Path:
    path = out / "run-manifest.json"
    write_manifest(
        path,
        result.config.to_dict(),
        extra={
            "record_rows": sum(len(recs) for recs in result.records.values()),
            "curve_rows": len(result.curves),
            "selection_rows": len(result.selections),
            "warnings": result.warnings,
        },
    )
    return path


def write_sweep_outputs(result: SweepResult, out_dir: str | Path) -> dict[str, Path]:
    """Write records.csv, curves.csv, and run-manifest.json under out_dir."""
    out = Path(out_dir)
    paths = {
        "records": out / "records.csv",
        "curves": out / "curves.csv",
    }
    write_records(paths["records"], list(result.records.values()))
    write_curves(paths["curves"], result.curves)
    paths["manifest"] = _write_run_manifest(result, out)
    return paths


def write_selection_outputs(result: SweepResult, out_dir: str | Path) -> dict[str, Path]:
    """Write selection.csv and run-manifest.json under out_dir."""
    out = Path(out_dir)
    paths = {"selection": out / "selection.csv"}
    write_selection(paths["selection"], result.selections)
    paths["manifest"] = _write_run_manifest(result, out)
    return paths


@dataclass
class OracleComparison:
    """Exact curve vs a Monte Carlo replication of the same instance."""

    curve: ExactCurve
    mc_rows: list[dict]
    r: int
    tol_se: float
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def compare_engine_to_oracle(
    sample: Sample | None = None,
    *,
    grid: tuple[float, ...] = DEFAULT_EPSILON_GRID,
    r: int = DEFAULT_ORACLE_R,
    master_seed: int = 20240801,
    tol_se: float = DEFAULT_ORACLE_TOL_SE,
) -> OracleComparison:
    """Replicate the exact curve with engine draws and check agreement.

    Draws r complete-randomization assignments of the fixed sample through the
    normal engine path, then thresholds them after the fact: the acceptance
    frequency must match the exact probability within tol_se binomial standard
    errors, and the conditional MSE must match the exact conditional MSE
    within tol_se standard errors of the accepted-draw mean.
    """
    if sample is None:
        sample = load_oracle_sample()
    curve = exact_curve(sample, list(grid))
    records = run_cell(
        sample.scenario,
        sample.n,
        DesignSpec.cr(),
        r=r,
        master_seed=master_seed,
        p=sample.p,
        injected_sample=sample,
    )
    asmds = np.array([rec.achieved_asmd for rec in records])
    tau_hats = np.array([rec.tau_hat for rec in records])
    sq_err = (tau_hats - curve.tau) ** 2

    mc_rows: list[dict] = []
    failures: list[str] = []
    for pt in curve.points:
        mask = asmds <= pt.epsilon
        k = int(mask.sum())
        row: dict = {"mc_r": r, "mc_p_accept": k / r}
        if pt.p_accept in (0.0, 1.0):
            # degenerate binomial: the frequency must match exactly
            row["mc_p_se"] = 0.0
            if row["mc_p_accept"] != pt.p_accept:
                failures.append(
                    f"eps={pt.epsilon:g}: acceptance frequency {row['mc_p_accept']:.6g} "
                    f"vs exact {pt.p_accept:g} with zero variance"
                )
        else:
            se = float(np.sqrt(pt.p_accept * (1.0 - pt.p_accept) / r))
            z = (row["mc_p_accept"] - pt.p_accept) / se
            row["mc_p_se"] = se
            row["p_z"] = z
            if abs(z) > tol_se:
                failures.append(
                    f"eps={pt.epsilon:g}: acceptance frequency off by {z:+.2f} SE "
                    f"({row['mc_p_accept']:.6g} vs exact {pt.p_accept:.6g})"
                )
        if pt.feasible and k >= 2:
            errs = sq_err[mask]
            mc_mse = float(errs.mean())
            mse_se = float(errs.std(ddof=1) / np.sqrt(k))
            row["mc_cond_mse"] = mc_mse
            row["mc_cond_mse_se"] = mse_se
            # Acceptance sets whose error distribution is constant (for example
            # a single complement pair) have an SE that is pure rounding noise,
            # so the SE gets a resolution floor before standardizing.
            se_eff = max(mse_se, 1e-12 * max(1.0, abs(pt.cond_mse)))
            z = (mc_mse - pt.cond_mse) / se_eff
            row["mse_z"] = z
            if abs(z) > tol_se:
                failures.append(
                    f"eps={pt.epsilon:g}: conditional MSE off by {z:+.2f} SE "
                    f"({mc_mse:.6g} vs exact {pt.cond_mse:.6g})"
                )
        mc_rows.append(row)
    return OracleComparison(
        curve=curve, mc_rows=mc_rows, r=r, tol_se=tol_se, failures=failures
    )


def write_oracle_output(comparison: OracleComparison, out_dir: str | Path) -> Path:
    path = Path(out_dir) / "oracle.csv"
    write_oracle(path, comparison.curve, comparison.mc_rows)
    return path
