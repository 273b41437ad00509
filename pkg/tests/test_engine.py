"""Tests for the replication engine, aggregation, and bootstrap SEs."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from fsmsweep.designs import ACCEPTED, EXHAUSTED, DesignSpec
from fsmsweep.dgp import ScenarioSpec, generate_sample
from fsmsweep.engine import (
    DEFAULT_EPSILON_GRID,
    CellSpec,
    GridSpec,
    ReplicationRecord,
    aggregate,
    bootstrap_se,
    filter_split,
    run_cell,
    run_cells,
)
from fsmsweep.metrics import asmd

BASELINE = ScenarioSpec(kind="baseline")


def _record(
    i: int,
    *,
    status: str = ACCEPTED,
    attempts: int = 1,
    achieved: float = 0.1,
    tau_hat: float | None = 1.0,
    ney: float | None = 0.05,
    epsilon: float | None = 0.1,
) -> ReplicationRecord:
    return ReplicationRecord(
        replication_index=i,
        scenario=BASELINE,
        n=8,
        design_kind="fsm",
        epsilon=epsilon,
        status=status,
        attempts=attempts,
        achieved_asmd=achieved,
        tau_hat=tau_hat if status == ACCEPTED else None,
        neyman_var=ney if status == ACCEPTED else None,
    )


def _injected_sample(seed: int = 404):
    return generate_sample(BASELINE, n=8, p=2, seed=seed)


def _enumerated_asmds(x: np.ndarray) -> list[float]:
    values = []
    for treated in itertools.combinations(range(x.shape[0]), x.shape[0] // 2):
        t = np.zeros(x.shape[0], dtype=np.int8)
        t[list(treated)] = 1
        values.append(asmd(x, t))
    return values


def test_grid_spec_default_contents() -> None:
    grid = GridSpec()
    assert grid.epsilons == DEFAULT_EPSILON_GRID
    assert len(grid.epsilons) == 21
    assert grid.epsilons[0] == 0.001
    assert grid.epsilons[-1] == 0.5
    with pytest.raises(ValueError):
        GridSpec(epsilons=(0.2, 0.1))
    with pytest.raises(ValueError):
        GridSpec(epsilons=(0.0, 0.1))


def test_run_cell_cr_accepts_everything() -> None:
    records = run_cell(BASELINE, 8, DesignSpec.cr(), r=50, master_seed=7, p=2)
    assert len(records) == 50
    assert [rec.replication_index for rec in records] == list(range(50))
    for rec in records:
        assert rec.status == ACCEPTED
        assert rec.attempts == 1
        assert rec.tau_hat is not None
        assert rec.neyman_var is not None
        assert rec.epsilon is None


def test_huge_threshold_cell_reproduces_cr_records() -> None:
    cr = run_cell(BASELINE, 8, DesignSpec.cr(), r=40, master_seed=11, p=2)
    fsm = run_cell(BASELINE, 8, DesignSpec.fsm(1e9), r=40, master_seed=11, p=2)
    for a, b in zip(cr, fsm):
        assert b.status == ACCEPTED
        assert b.attempts == 1
        assert a.tau_hat == b.tau_hat
        assert a.neyman_var == b.neyman_var
        assert a.achieved_asmd == b.achieved_asmd


def test_impossible_threshold_cell_exhausts() -> None:
    records = run_cell(BASELINE, 8, DesignSpec.fsm(1e-15, max_attempts=10), r=20, master_seed=3, p=2)
    for rec in records:
        assert rec.status == EXHAUSTED
        assert rec.attempts == 10
        assert rec.tau_hat is None
    point = aggregate(records, None, bootstrap_b=50)
    assert not point.feasible
    assert point.r_effective == 0
    assert point.mse is None
    assert point.vrr is None
    assert point.exhaustion_rate == 1.0
    assert point.accept_prob_single == 0.0


def test_attempts_are_monotone_across_thresholds_per_replication() -> None:
    thresholds = [0.1, 0.2, 0.4, 0.8]
    cells = [
        run_cell(BASELINE, 12, DesignSpec.fsm(eps, max_attempts=30), r=60, master_seed=5, p=3)
        for eps in thresholds
    ]
    for rep in range(60):
        attempts = [cell[rep].attempts for cell in cells]
        for lo, hi in zip(attempts, attempts[1:]):
            assert hi <= lo
        accepted = [cell[rep].accepted for cell in cells]
        for was, now in zip(accepted, accepted[1:]):
            assert now or not was


def test_injected_sample_limits_balance_values_to_enumerated_set() -> None:
    sample = _injected_sample()
    allowed = set(_enumerated_asmds(sample.x))
    records = run_cell(
        BASELINE, 8, DesignSpec.cr(), r=100, master_seed=13, p=2, injected_sample=sample
    )
    assert {rec.achieved_asmd for rec in records} <= allowed


def test_aggregate_hand_built_records() -> None:
    records = [
        _record(0, attempts=1, achieved=0.05, tau_hat=0.8, ney=0.02),
        _record(1, attempts=3, achieved=0.07, tau_hat=1.2, ney=0.04),
        _record(2, attempts=6, achieved=0.03, tau_hat=1.0, ney=0.03),
        _record(3, status=EXHAUSTED, attempts=80, achieved=0.15),
    ]
    baseline = [
        _record(0, epsilon=None, ney=0.05),
        _record(1, epsilon=None, ney=0.07),
    ]
    point = aggregate(records, baseline, bootstrap_b=100)
    assert point.r_total == 4
    assert point.r_effective == 3
    assert point.feasible
    assert point.accept_within_attempts == pytest.approx(0.75, rel=1e-12)
    assert point.exhaustion_rate == pytest.approx(0.25, rel=1e-12)
    assert point.accept_prob_single == pytest.approx(3.0 / 90.0, rel=1e-12)
    assert point.asmd_mean == pytest.approx(0.05, rel=1e-12)
    assert point.bias == pytest.approx(0.0, abs=1e-15)
    assert point.variance == pytest.approx(0.04, rel=1e-12)
    assert point.mse == pytest.approx(0.04, rel=1e-12)
    assert point.avg_neyman_var == pytest.approx(0.03, rel=1e-12)
    assert point.vrr == pytest.approx(0.5, rel=1e-12)


def test_aggregate_mse_identity_on_real_cell() -> None:
    records = run_cell(BASELINE, 8, DesignSpec.cr(), r=200, master_seed=17, p=2)
    point = aggregate(records, records, bootstrap_b=50)
    assert point.mse == pytest.approx(point.bias**2 + point.variance, rel=1e-10)
    assert point.vrr == pytest.approx(1.0, rel=1e-12)


def test_bootstrap_zero_spread_statistics() -> None:
    records = [_record(i, tau_hat=1.0, achieved=0.2) for i in range(20)]
    assert bootstrap_se(records, "mse", b=200, seed=1) == 0.0
    assert bootstrap_se(records, "asmd_mean", b=200, seed=1) == 0.0


def test_bootstrap_accept_prob_matches_binomial_on_single_draw_cell() -> None:
    # With max_attempts = 1 each replication is one Bernoulli trial, so the
    # bootstrap SE must land near sqrt(p(1-p)/R).
    sample = _injected_sample(seed=808)
    values = sorted(_enumerated_asmds(sample.x))
    eps = (values[34] + values[35]) / 2.0
    records = run_cell(
        BASELINE,
        8,
        DesignSpec.fsm(eps, max_attempts=1),
        r=400,
        master_seed=23,
        p=2,
        injected_sample=sample,
    )
    p_hat = sum(rec.accepted for rec in records) / len(records)
    assert 0.2 < p_hat < 0.8
    se_boot = bootstrap_se(records, "accept_prob", b=1000, seed=2)
    se_binomial = math.sqrt(p_hat * (1 - p_hat) / len(records))
    assert abs(se_boot - se_binomial) / se_binomial < 0.2


def test_bootstrap_se_shrinks_with_replications() -> None:
    sample = _injected_sample(seed=909)
    values = sorted(_enumerated_asmds(sample.x))
    eps = (values[34] + values[35]) / 2.0
    design = DesignSpec.fsm(eps, max_attempts=1)
    small = run_cell(BASELINE, 8, design, r=200, master_seed=29, p=2, injected_sample=sample)
    big = run_cell(BASELINE, 8, design, r=800, master_seed=29, p=2, injected_sample=sample)
    ratio = bootstrap_se(small, "accept_prob", b=800, seed=3) / bootstrap_se(
        big, "accept_prob", b=800, seed=3
    )
    assert 1.5 < ratio < 2.7  # ~2 expected for a 4x replication count


def test_bootstrap_validation() -> None:
    records = [_record(0), _record(1, status=EXHAUSTED, attempts=80)]
    with pytest.raises(ValueError):
        bootstrap_se(records, "mse", b=100, seed=1)  # only one accepted
    with pytest.raises(ValueError):
        bootstrap_se(records, "mystery", b=100, seed=1)
    with pytest.raises(ValueError):
        bootstrap_se([], "mse", b=100, seed=1)
    with pytest.raises(ValueError):
        bootstrap_se([_record(0), _record(1)], "vrr", b=100, seed=1)  # no baseline


def test_run_cells_workers_do_not_change_records() -> None:
    cells = [
        CellSpec(BASELINE, 8, DesignSpec.cr()),
        CellSpec(BASELINE, 8, DesignSpec.rr(max_attempts=20)),
        CellSpec(BASELINE, 8, DesignSpec.fsm(0.3, max_attempts=20)),
        CellSpec(BASELINE, 10, DesignSpec.fsm(0.5, max_attempts=20)),
    ]
    serial = run_cells(cells, r=30, master_seed=31, p=2, workers=1)
    parallel = run_cells(cells, r=30, master_seed=31, p=2, workers=3)
    assert serial == parallel


def test_filter_split() -> None:
    records = [_record(i) for i in range(10)]
    subset = filter_split(records, {1, 3, 5})
    assert [rec.replication_index for rec in subset] == [1, 3, 5]
    assert filter_split(records, None) == records


def test_run_cell_validation() -> None:
    with pytest.raises(ValueError):
        run_cell(BASELINE, 8, DesignSpec.cr(), r=0, master_seed=1, p=2)
    with pytest.raises(ValueError):
        run_cell(BASELINE, 7, DesignSpec.cr(), r=5, master_seed=1, p=2)
    with pytest.raises(ValueError):
        run_cell(
            BASELINE,
            10,
            DesignSpec.cr(),
            r=5,
            master_seed=1,
            p=2,
            injected_sample=_injected_sample(),
        )
