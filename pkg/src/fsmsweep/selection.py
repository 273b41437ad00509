"""Threshold selection on a train/test split of replications.

The replication indices of a run are partitioned once per (scenario, n) study;
selection rules look only at curve points aggregated from the training half,
and the chosen threshold is then re-evaluated on the held-out half. Cells with
fewer than 2 accepted training replications are skipped as infeasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import CurvePoint, ReplicationRecord, aggregate
from .seeding import tagged_stream

RULE_MIN_MSE = "min_mse"
RULE_CONSTRAINED = "constrained_min_mse"

DEFAULT_MSE_SLACK = 1.10
DEFAULT_ACCEPT_FLOOR = 0.05


class SelectionError(RuntimeError):
    """No admissible threshold under the requested rule."""


@dataclass(frozen=True)
class SplitPlan:
    """Disjoint train/test partition of replication indices 0..r-1."""

    r: int
    split_seed: int
    train: frozenset[int]
    test: frozenset[int]


def split(r: int, split_seed: int) -> SplitPlan:
    """Deterministic half split; train gets floor(r/2) indices."""
    if r < 2:
        raise ValueError(f"need r >= 2 to split, got {r}")
    perm = tagged_stream(split_seed, "split").permutation(r)
    train = frozenset(int(i) for i in perm[: r // 2])
    test = frozenset(int(i) for i in perm[r // 2 :])
    return SplitPlan(r=r, split_seed=split_seed, train=train, test=test)


@dataclass
class SelectionResult:
    """A selected threshold, the evidence behind it, and its holdout score."""

    rule: str
    scenario: str
    n: int
    epsilon_star: float
    train_mse: float
    min_accept: float | None = None
    skipped_epsilons: list[float] = field(default_factory=list)
    feasible_band: tuple[float, float] | None = None
    test_point: CurvePoint | None = None


def _sweep_points(train_curve: list[CurvePoint]) -> list[CurvePoint]:
    pts = [pt for pt in train_curve if pt.design == "fsm" and pt.epsilon is not None]
    if not pts:
        raise ValueError("train curve contains no threshold-design points")
    return sorted(pts, key=lambda pt: pt.epsilon)


def _argmin_mse(points: list[CurvePoint]) -> CurvePoint:
    # Ties break toward the larger threshold: cheaper acceptance, same MSE.
    return min(points, key=lambda pt: (pt.mse, -pt.epsilon))


def feasible_band(
    train_curve: list[CurvePoint],
    *,
    mse_slack: float = DEFAULT_MSE_SLACK,
    accept_floor: float = DEFAULT_ACCEPT_FLOOR,
) -> tuple[float, float] | None:
    """Threshold range with near-minimal MSE and workable acceptance.

    Scans feasible train points for mse <= mse_slack * min(mse) and
    accept_prob_single >= accept_floor; returns the (lo, hi) thresholds of the
    qualifying set, or None when nothing qualifies.
    """
    pts = [pt for pt in _sweep_points(train_curve) if pt.feasible]
    if not pts:
        return None
    best = min(pt.mse for pt in pts)
    good = [
        pt.epsilon
        for pt in pts
        if pt.mse <= mse_slack * best and pt.accept_prob_single >= accept_floor
    ]
    if not good:
        return None
    return (min(good), max(good))


def select_min_mse(train_curve: list[CurvePoint]) -> SelectionResult:
    """Pick the feasible threshold with the smallest training MSE."""
    pts = _sweep_points(train_curve)
    feasible = [pt for pt in pts if pt.feasible]
    skipped = [pt.epsilon for pt in pts if not pt.feasible]
    if not feasible:
        raise SelectionError(
            "every threshold cell is infeasible (fewer than 2 accepted training "
            "replications); enlarge the grid, the attempt budget, or r"
        )
    best = _argmin_mse(feasible)
    return SelectionResult(
        rule=RULE_MIN_MSE,
        scenario=best.scenario,
        n=best.n,
        epsilon_star=best.epsilon,
        train_mse=best.mse,
        skipped_epsilons=skipped,
        feasible_band=feasible_band(train_curve),
    )


def select_constrained(
    train_curve: list[CurvePoint], min_accept: float
) -> SelectionResult:
    """Smallest-MSE threshold among cells with acceptance >= min_accept."""
    if not 0.0 <= min_accept <= 1.0:
        raise ValueError(f"min_accept must lie in [0, 1], got {min_accept!r}")
    pts = _sweep_points(train_curve)
    feasible = [pt for pt in pts if pt.feasible]
    if not feasible:
        raise SelectionError(
            "every threshold cell is infeasible (fewer than 2 accepted training "
            "replications); enlarge the grid, the attempt budget, or r"
        )
    eligible = [pt for pt in feasible if pt.accept_prob_single >= min_accept]
    if not eligible:
        reachable = max(pt.accept_prob_single for pt in feasible)
        raise SelectionError(
            f"no feasible threshold has acceptance probability >= {min_accept:g}; "
            f"the largest reachable floor on this grid is {reachable:.6g}"
        )
    skipped = [pt.epsilon for pt in pts if pt not in eligible]
    best = _argmin_mse(eligible)
    return SelectionResult(
        rule=RULE_CONSTRAINED,
        scenario=best.scenario,
        n=best.n,
        epsilon_star=best.epsilon,
        train_mse=best.mse,
        min_accept=min_accept,
        skipped_epsilons=skipped,
        feasible_band=feasible_band(train_curve),
    )


def evaluate_on_test(
    result: SelectionResult,
    test_records: list[ReplicationRecord],
    cr_baseline_records: list[ReplicationRecord] | None,
    *,
    bootstrap_b: int = 1000,
    bootstrap_seed: int = 0,
) -> CurvePoint:
    """Aggregate the held-out records of the selected cell and attach them."""
    if test_records and test_records[0].epsilon != result.epsilon_star:
        raise ValueError(
            f"test records belong to threshold {test_records[0].epsilon!r}, "
            f"selection chose {result.epsilon_star!r}"
        )
    point = aggregate(
        test_records,
        cr_baseline_records,
        split="test",
        bootstrap_b=bootstrap_b,
        bootstrap_seed=bootstrap_seed,
    )
    result.test_point = point
    return point
