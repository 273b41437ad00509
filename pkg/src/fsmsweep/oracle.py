"""Exact enumeration of the randomization distribution on small instances.

For even n up to 20 every fixed-half assignment is enumerated in a
deterministic order, giving the exact acceptance probability and the exact
conditional moments of the mean-difference estimator at each threshold. This
is the reference the Monte Carlo engine is validated against, and the basis
for the threshold-monotonicity diagnostics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .dgp import Sample
from .metrics import asmd, diff_in_means

MAX_ENUM_N = 20


@dataclass
class ExactPoint:
    """Exact quantities at one threshold."""

    epsilon: float
    p_accept: float
    n_accepted: int
    cond_mean: float | None
    cond_var: float | None
    cond_mse: float | None
    ref_var_over_p: float | None  # unconditional variance / p_accept

    @property
    def feasible(self) -> bool:
        return self.n_accepted > 0


@dataclass
class ExactCurve:
    """Exact acceptance curve of one instance over a threshold grid."""

    n: int
    p: int
    tau: float
    asmds: np.ndarray
    tau_hats: np.ndarray
    uncond_mean: float
    uncond_var: float
    points: list[ExactPoint] = field(default_factory=list)


@dataclass
class LemmaReport:
    """Structural diagnostics of an exact curve.

    Acceptance probability must be nondecreasing in the threshold (nested
    acceptance regions); the remaining fields are diagnostics: conditional
    variance monotonicity and MSE convexity can fail on discrete instances,
    and the gap to the variance-over-acceptance reference shows how far the
    conditional variance sits below unconditional_variance / p_accept.
    """

    p_nondecreasing: bool
    p_violations: list[tuple[float, float, float, float]]
    cond_var_nonincreasing: bool
    cond_var_violations: list[tuple[float, float, float, float]]
    gap_vs_var_over_p: list[tuple[float, float]]
    mse_convexity_violations: list[tuple[float, float, float]]


def enumerate_assignments(n: int) -> np.ndarray:
    """All fixed-half assignments of n units, in combinations order."""
    if n < 4 or n % 2 != 0:
        raise ValueError(f"enumeration needs even n >= 4, got {n}")
    if n > MAX_ENUM_N:
        raise ValueError(f"enumeration supports n <= {MAX_ENUM_N}, got {n}")
    rows = []
    for treated in itertools.combinations(range(n), n // 2):
        t = np.zeros(n, dtype=np.int8)
        t[list(treated)] = 1
        rows.append(t)
    return np.array(rows, dtype=np.int8)


def _validate_grid(grid: list[float] | np.ndarray) -> list[float]:
    grid = [float(e) for e in grid]
    if not grid:
        raise ValueError("threshold grid is empty")
    if any(e <= 0 for e in grid):
        raise ValueError("thresholds must be > 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("threshold grid must be strictly increasing")
    return grid


def exact_curve(sample: Sample, grid: list[float] | np.ndarray) -> ExactCurve:
    """Exact acceptance curve of ``sample`` over ``grid``.

    Walks every fixed-half assignment, so the uniform-over-assignments
    moments are population quantities, not estimates.
    """
    grid = _validate_grid(grid)
    diffs = sample.y1 - sample.y0
    if diffs.size == 0 or diffs.max() != diffs.min():
        raise ValueError("sample must carry a constant additive effect")
    tau = float(diffs[0])

    assignments = enumerate_assignments(sample.n)
    asmds = np.empty(len(assignments))
    tau_hats = np.empty(len(assignments))
    for i, t in enumerate(assignments):
        asmds[i] = asmd(sample.x, t)
        y_obs = np.where(t == 1, sample.y1, sample.y0)
        tau_hats[i] = diff_in_means(y_obs, t)

    uncond_mean = float(tau_hats.mean())
    uncond_var = float(tau_hats.var())  # population variance: exact distribution

    points = []
    for eps in grid:
        mask = asmds <= eps
        k = int(mask.sum())
        if k == 0:
            points.append(
                ExactPoint(
                    epsilon=eps,
                    p_accept=0.0,
                    n_accepted=0,
                    cond_mean=None,
                    cond_var=None,
                    cond_mse=None,
                    ref_var_over_p=None,
                )
            )
            continue
        p_accept = k / len(assignments)
        accepted = tau_hats[mask]
        cond_mean = float(accepted.mean())
        cond_var = float(accepted.var())
        cond_mse = (cond_mean - tau) ** 2 + cond_var
        points.append(
            ExactPoint(
                epsilon=eps,
                p_accept=p_accept,
                n_accepted=k,
                cond_mean=cond_mean,
                cond_var=cond_var,
                cond_mse=cond_mse,
                ref_var_over_p=uncond_var / p_accept,
            )
        )
    return ExactCurve(
        n=sample.n,
        p=sample.p,
        tau=tau,
        asmds=asmds,
        tau_hats=tau_hats,
        uncond_mean=uncond_mean,
        uncond_var=uncond_var,
        points=points,
    )


def lemma_check(curve: ExactCurve) -> LemmaReport:
    """Structural diagnostics of an exact curve; see LemmaReport."""
    pts = curve.points
    p_violations = [
        (a.epsilon, b.epsilon, a.p_accept, b.p_accept)
        for a, b in zip(pts, pts[1:])
        if b.p_accept < a.p_accept
    ]
    feasible = [pt for pt in pts if pt.feasible]
    var_violations = [
        (a.epsilon, b.epsilon, a.cond_var, b.cond_var)
        for a, b in zip(feasible, feasible[1:])
        if b.cond_var > a.cond_var
    ]
    gaps = [(pt.epsilon, pt.cond_var - pt.ref_var_over_p) for pt in feasible]
    convexity = []
    for a, b, c in zip(feasible, feasible[1:], feasible[2:]):
        left = (b.cond_mse - a.cond_mse) / (b.epsilon - a.epsilon)
        right = (c.cond_mse - b.cond_mse) / (c.epsilon - b.epsilon)
        if right < left:
            convexity.append((a.epsilon, b.epsilon, c.epsilon))
    return LemmaReport(
        p_nondecreasing=not p_violations,
        p_violations=p_violations,
        cond_var_nonincreasing=not var_violations,
        cond_var_violations=var_violations,
        gap_vs_var_over_p=gaps,
        mse_convexity_violations=convexity,
    )
