"""Replication engine: run design cells, aggregate curves, bootstrap SEs.

A cell is (scenario, n, design); running it produces one ReplicationRecord per
replication. Replication r derives its seed from (master_seed, scenario code,
n, r) only, so every design and threshold sees the same sample and the same
candidate stream for a given r: acceptance events at nested thresholds are
nested draws of the same pool, and a threshold larger than every observed ASMD
reproduces complete randomization record for record.

Conditional estimands (bias, variance, mse, balance, Neyman average) are
computed over accepted replications only; exhausted replications stay in the
record set and feed the acceptance-side columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from .designs import ACCEPTED, CR, FIXED_HALF, DesignSpec, assign
from .dgp import Sample, ScenarioSpec, generate_sample
from .metrics import diff_in_means, neyman_variance
from .seeding import replication_seed, stable_hash_int

DEFAULT_EPSILON_GRID: tuple[float, ...] = (
    0.001,
    0.002,
    0.003,
    0.004,
    0.005,
    0.006,
    0.007,
    0.008,
    0.009,
    0.01,
    0.015,
    0.02,
    0.03,
    0.05,
    0.075,
    0.1,
    0.15,
    0.2,
    0.3,
    0.4,
    0.5,
)

DEFAULT_P = 5
DEFAULT_BOOTSTRAP_B = 1000

STATISTICS = ("mse", "asmd_mean", "accept_prob", "vrr")


@dataclass(frozen=True)
class GridSpec:
    """Strictly increasing positive thresholds to sweep."""

    epsilons: tuple[float, ...] = DEFAULT_EPSILON_GRID

    def __post_init__(self) -> None:
        eps = self.epsilons
        if not eps:
            raise ValueError("threshold grid is empty")
        if any(e <= 0 for e in eps):
            raise ValueError("thresholds must be > 0")
        if any(b <= a for a, b in zip(eps, eps[1:])):
            raise ValueError("threshold grid must be strictly increasing")


@dataclass(frozen=True)
class CellSpec:
    """One unit of simulation work."""

    scenario: ScenarioSpec
    n: int
    design: DesignSpec


@dataclass
class ReplicationRecord:
    """Outcome of one replication of one cell."""

    replication_index: int
    scenario: ScenarioSpec
    n: int
    design_kind: str
    epsilon: float | None
    status: str
    attempts: int
    achieved_asmd: float
    tau_hat: float | None
    neyman_var: float | None

    @property
    def accepted(self) -> bool:
        return self.status == ACCEPTED


@dataclass
class CurvePoint:
    """Aggregated cell summary for one split of the record set."""

    scenario: str
    n: int
    epsilon: float | None
    split: str
    design: str
    r_total: int
    r_effective: int
    feasible: bool
    accept_prob_single: float
    accept_prob_single_se: float
    accept_within_attempts: float
    exhaustion_rate: float
    asmd_mean: float | None = None
    asmd_se: float | None = None
    bias: float | None = None
    variance: float | None = None
    mse: float | None = None
    mse_se: float | None = None
    avg_neyman_var: float | None = None
    vrr: float | None = None
    vrr_se: float | None = None


def run_cell(
    scenario: ScenarioSpec,
    n: int,
    design: DesignSpec,
    r: int,
    master_seed: int,
    *,
    p: int = DEFAULT_P,
    injected_sample: Sample | None = None,
) -> list[ReplicationRecord]:
    """Run r replications of one cell, one record each.

    ``injected_sample`` bypasses generation and reuses a fixed sample for
    every replication (oracle validation); the assignment stream is derived
    exactly as in a normal run.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if design.allocation == FIXED_HALF and n % 2 != 0:
        raise ValueError(f"fixed_half allocation needs even n, got {n}")
    if injected_sample is not None and injected_sample.n != n:
        raise ValueError(
            f"injected sample has n={injected_sample.n}, cell expects n={n}"
        )
    records = []
    for rep in range(r):
        sample_ss, assign_ss = replication_seed(master_seed, scenario.code, n, rep).spawn(2)
        if injected_sample is None:
            sample = generate_sample(scenario, n, p, sample_ss)
        else:
            sample = injected_sample
        assign_rng = np.random.Generator(np.random.PCG64(assign_ss))
        outcome = assign(sample.x, design, assign_rng)
        a = outcome.assignment
        if outcome.accepted:
            y_obs = np.where(a.t == 1, sample.y1, sample.y0)
            tau_hat = diff_in_means(y_obs, a.t)
            ney = neyman_variance(y_obs, a.t)
        else:
            tau_hat = None
            ney = None
        records.append(
            ReplicationRecord(
                replication_index=rep,
                scenario=scenario,
                n=n,
                design_kind=design.kind,
                epsilon=design.threshold,
                status=outcome.status,
                attempts=a.attempts,
                achieved_asmd=a.achieved_asmd,
                tau_hat=tau_hat,
                neyman_var=ney,
            )
        )
    return records


def _run_cell_task(args: tuple[int, CellSpec, int, int, int]) -> tuple[int, list[ReplicationRecord]]:
    index, cell, r, master_seed, p = args
    return index, run_cell(cell.scenario, cell.n, cell.design, r, master_seed, p=p)


def run_cells(
    cells: list[CellSpec],
    r: int,
    master_seed: int,
    *,
    p: int = DEFAULT_P,
    workers: int = 1,
    progress: bool = False,
) -> list[list[ReplicationRecord]]:
    """Run many cells, optionally across worker processes.

    Cells are independent work units keyed by position, so the result is
    identical for any worker count.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    tasks = [(i, cell, r, master_seed, p) for i, cell in enumerate(cells)]
    results: list[list[ReplicationRecord] | None] = [None] * len(cells)
    if workers == 1 or len(cells) == 1:
        iterator = map(_run_cell_task, tasks)
    else:
        ctx = get_context("spawn")
        pool = ctx.Pool(processes=min(workers, len(cells)))
        iterator = pool.imap_unordered(_run_cell_task, tasks)
    done = 0
    for index, records in iterator:
        results[index] = records
        done += 1
        if progress:
            cell = cells[index]
            print(
                f"  [{done}/{len(cells)}] {cell.scenario.kind} n={cell.n} "
                f"{cell.design.label()}",
                flush=True,
            )
    if workers > 1 and len(cells) > 1:
        pool.close()
        pool.join()
    assert all(recs is not None for recs in results)
    return results  # type: ignore[return-value]


def default_designs(
    grid: GridSpec,
    *,
    rr_threshold: float = 0.1,
    max_attempts: int = 80,
    allocation: str = FIXED_HALF,
) -> list[DesignSpec]:
    """CR and RR benchmarks plus one threshold-acceptance design per grid point."""
    designs = [
        DesignSpec.cr(allocation=allocation),
        DesignSpec.rr(threshold=rr_threshold, max_attempts=max_attempts, allocation=allocation),
    ]
    designs.extend(
        DesignSpec.fsm(eps, max_attempts=max_attempts, allocation=allocation)
        for eps in grid.epsilons
    )
    return designs


def _bootstrap_rng(seed: int, statistic: str) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=[int(seed), stable_hash_int(f"bootstrap|{statistic}")])
    return np.random.Generator(np.random.PCG64(ss))


def bootstrap_se(
    records: list[ReplicationRecord],
    statistic: str,
    b: int = DEFAULT_BOOTSTRAP_B,
    seed: int = 0,
    *,
    baseline_records: list[ReplicationRecord] | None = None,
) -> float:
    """Nonparametric bootstrap standard error of a cell statistic.

    mse and asmd_mean resample the accepted records; accept_prob resamples the
    full record set (successes over total candidate draws); vrr resamples the
    cell's accepted records and the baseline cell's accepted records
    independently.
    """
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}; expected one of {STATISTICS}")
    if b < 2:
        raise ValueError(f"bootstrap needs b >= 2, got {b}")
    if not records:
        raise ValueError("no records to resample")
    rng = _bootstrap_rng(seed, statistic)

    if statistic == "accept_prob":
        successes = np.array([1.0 if rec.accepted else 0.0 for rec in records])
        draws = np.array([rec.attempts for rec in records], dtype=np.float64)
        idx = rng.integers(0, len(records), size=(b, len(records)))
        values = successes[idx].sum(axis=1) / draws[idx].sum(axis=1)
        return float(values.std(ddof=1))

    accepted = [rec for rec in records if rec.accepted]
    if len(accepted) < 2:
        raise ValueError(f"statistic {statistic!r} needs >= 2 accepted records, got {len(accepted)}")

    if statistic == "asmd_mean":
        values = np.array([rec.achieved_asmd for rec in accepted])
        idx = rng.integers(0, len(values), size=(b, len(values)))
        return float(values[idx].mean(axis=1).std(ddof=1))

    if statistic == "mse":
        tau = accepted[0].scenario.tau
        tau_hats = np.array([rec.tau_hat for rec in accepted])
        idx = rng.integers(0, len(tau_hats), size=(b, len(tau_hats)))
        resampled = tau_hats[idx]
        biases = resampled.mean(axis=1) - tau
        variances = resampled.var(axis=1, ddof=1)
        return float((biases**2 + variances).std(ddof=1))

    # vrr
    if baseline_records is None:
        raise ValueError("vrr bootstrap needs baseline_records")
    base_accepted = [rec for rec in baseline_records if rec.accepted]
    if len(base_accepted) < 2:
        raise ValueError("vrr bootstrap needs >= 2 accepted baseline records")
    num = np.array([rec.neyman_var for rec in accepted])
    den = np.array([rec.neyman_var for rec in base_accepted])
    den_rng = _bootstrap_rng(seed, "vrr-denominator")
    num_idx = rng.integers(0, len(num), size=(b, len(num)))
    den_idx = den_rng.integers(0, len(den), size=(b, len(den)))
    values = num[num_idx].mean(axis=1) / den[den_idx].mean(axis=1)
    return float(values.std(ddof=1))


def aggregate(
    records: list[ReplicationRecord],
    cr_baseline_records: list[ReplicationRecord] | None,
    *,
    split: str = "all",
    bootstrap_b: int = DEFAULT_BOOTSTRAP_B,
    bootstrap_seed: int = 0,
) -> CurvePoint:
    """Summarize one cell's records (restricted to one split) as a CurvePoint.

    ``cr_baseline_records`` must come from the complete-randomization cell of
    the same (scenario, n) and the same split; passing the cell's own records
    there yields vrr = 1 by construction. With fewer than 2 accepted records
    the point is flagged infeasible and conditional fields stay absent.
    """
    if not records:
        raise ValueError("cannot aggregate an empty record set")
    scenario = records[0].scenario
    r_total = len(records)
    accepted = [rec for rec in records if rec.accepted]
    r_effective = len(accepted)
    total_draws = sum(rec.attempts for rec in records)
    point = CurvePoint(
        scenario=scenario.kind,
        n=records[0].n,
        epsilon=records[0].epsilon,
        split=split,
        design=records[0].design_kind,
        r_total=r_total,
        r_effective=r_effective,
        feasible=r_effective >= 2,
        accept_prob_single=r_effective / total_draws,
        accept_prob_single_se=bootstrap_se(
            records, "accept_prob", b=bootstrap_b, seed=bootstrap_seed
        ),
        accept_within_attempts=r_effective / r_total,
        exhaustion_rate=1.0 - r_effective / r_total,
    )
    if not point.feasible:
        return point

    tau_hats = np.array([rec.tau_hat for rec in accepted])
    point.asmd_mean = float(np.mean([rec.achieved_asmd for rec in accepted]))
    point.asmd_se = bootstrap_se(records, "asmd_mean", b=bootstrap_b, seed=bootstrap_seed)
    point.bias = float(tau_hats.mean() - scenario.tau)
    point.variance = float(tau_hats.var(ddof=1))
    point.mse = point.bias**2 + point.variance
    point.mse_se = bootstrap_se(records, "mse", b=bootstrap_b, seed=bootstrap_seed)
    point.avg_neyman_var = float(np.mean([rec.neyman_var for rec in accepted]))
    if cr_baseline_records is not None:
        base_accepted = [rec for rec in cr_baseline_records if rec.accepted]
        if len(base_accepted) >= 2:
            base_avg = float(np.mean([rec.neyman_var for rec in base_accepted]))
            point.vrr = point.avg_neyman_var / base_avg
            point.vrr_se = bootstrap_se(
                records,
                "vrr",
                b=bootstrap_b,
                seed=bootstrap_seed,
                baseline_records=cr_baseline_records,
            )
    return point


def filter_split(
    records: list[ReplicationRecord], indices: frozenset[int] | set[int] | None
) -> list[ReplicationRecord]:
    """Restrict a record set to the given replication indices (None = all)."""
    if indices is None:
        return list(records)
    return [rec for rec in records if rec.replication_index in indices]
