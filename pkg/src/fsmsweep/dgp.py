"""Synthetic sample generation.

Every scenario draws an (n, p) covariate matrix with (approximately)
standardized columns, builds the control outcome as the unit-weighted
covariate sum plus noise, and adds a constant additive effect:

    y0 = x @ 1 + noise        y1 = y0 + tau  (exactly, elementwise)

Scenario kinds:
  baseline         iid standard normal covariates, N(0, 1) noise
  correlated       compound-symmetric covariates (pairwise correlation rho)
  heavy_tail_t3    t_3 covariates scaled by sqrt(1/3) to unit variance
  skewed_chisq2    (chi^2_2 - 2) / 2 covariates (mean 0, variance 1)
  heteroskedastic  baseline covariates, noise sd 1 + slope * |x_1|
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BASELINE = "baseline"
CORRELATED = "correlated"
HEAVY_TAIL_T3 = "heavy_tail_t3"
SKEWED_CHISQ2 = "skewed_chisq2"
HETEROSKEDASTIC = "heteroskedastic"

# Codes feed seed entropy and must never be renumbered.
_SCENARIO_CODES = {
    BASELINE: 1,
    CORRELATED: 2,
    HEAVY_TAIL_T3: 3,
    SKEWED_CHISQ2: 4,
    HETEROSKEDASTIC: 5,
}
SCENARIO_KINDS = frozenset(_SCENARIO_CODES)


def scenario_code(kind: str) -> int:
    """Stable integer code of a scenario kind, used in seed derivation."""
    try:
        return _SCENARIO_CODES[kind]
    except KeyError:
        raise ValueError(f"unknown scenario kind {kind!r}") from None


@dataclass(frozen=True)
class ScenarioSpec:
    """Covariate law, noise law, and constant effect size for one scenario."""

    kind: str = BASELINE
    tau: float = 1.0
    rho: float = 0.5
    hetero_slope: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(
                f"unknown scenario kind {self.kind!r}; expected one of {sorted(SCENARIO_KINDS)}"
            )
        if not math.isfinite(self.tau):
            raise ValueError(f"tau must be finite, got {self.tau!r}")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho!r}")
        if self.hetero_slope < 0.0:
            raise ValueError(f"hetero_slope must be >= 0, got {self.hetero_slope!r}")

    @property
    def code(self) -> int:
        return _SCENARIO_CODES[self.kind]


@dataclass
class Sample:
    """One generated dataset with both potential outcomes."""

    x: np.ndarray
    y0: np.ndarray
    y1: np.ndarray
    scenario: ScenarioSpec
    seed: tuple[int, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


def _as_generator(seed: int | np.random.SeedSequence | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def _seed_id(seed: int | np.random.SeedSequence | np.random.Generator) -> tuple[int, ...]:
    if isinstance(seed, np.random.SeedSequence):
        entropy = seed.entropy
        parts = entropy if isinstance(entropy, (list, tuple)) else [entropy]
        return tuple(int(v) for v in parts) + tuple(seed.spawn_key)
    if isinstance(seed, np.random.Generator):
        return ()
    return (int(seed),)


def _draw_covariates(scenario: ScenarioSpec, n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    if scenario.kind in (BASELINE, HETEROSKEDASTIC):
        return rng.standard_normal((n, p))
    if scenario.kind == CORRELATED:
        z = rng.standard_normal((n, p))
        sigma = np.full((p, p), scenario.rho)
        np.fill_diagonal(sigma, 1.0)
        chol = np.linalg.cholesky(sigma)
        return z @ chol.T
    if scenario.kind == HEAVY_TAIL_T3:
        return rng.standard_t(3, size=(n, p)) * math.sqrt(1.0 / 3.0)
    if scenario.kind == SKEWED_CHISQ2:
        return (rng.chisquare(2, size=(n, p)) - 2.0) / 2.0
    raise ValueError(f"unknown scenario kind {scenario.kind!r}")


def _force_exact_offset(
    y0: np.ndarray, y1: np.ndarray, tau: float
) -> tuple[np.ndarray, np.ndarray]:
    # Rounding in y0 + tau can leave (y1 - y0) != tau in the last ulp. Refit
    # the offending entries from the rounded sum; this converges whenever tau
    # has a short binary mantissa (any dyadic rational, e.g. the default 1.0).
    for attempt in range(6):
        bad = (y1 - y0) != tau
        if not bad.any():
            return y0, y1
        if attempt % 2 == 0:
            y0 = y0.copy()
            y0[bad] = y1[bad] - tau
        else:
            y1 = y1.copy()
            y1[bad] = y0[bad] + tau
    raise FloatingPointError(
        f"cannot make y1 - y0 == tau exact for tau={tau!r}; use a dyadic effect size"
    )


def generate_sample(
    scenario: ScenarioSpec,
    n: int,
    p: int,
    seed: int | np.random.SeedSequence | np.random.Generator,
) -> Sample:
    """Draw one sample of size n with p covariates under the given scenario.

    The draw order (covariates, then noise) is fixed; identical seeds give
    bitwise-identical samples.
    """
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    rng = _as_generator(seed)
    x = _draw_covariates(scenario, n, p, rng)
    noise = rng.standard_normal(n)
    if scenario.kind == HETEROSKEDASTIC:
        noise = noise * (1.0 + scenario.hetero_slope * np.abs(x[:, 0]))
    y0 = x.sum(axis=1) + noise
    y1 = y0 + scenario.tau
    y0, y1 = _force_exact_offset(y0, y1, scenario.tau)
    return Sample(x=x, y0=y0, y1=y1, scenario=scenario, seed=_seed_id(seed))
