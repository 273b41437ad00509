"""Assignment designs built on acceptance sampling of the balance statistic.

Three kinds share one code path:

  cr   complete randomization: the first candidate is always accepted
  rr   threshold acceptance at the conventional cutoff 0.1
  fsm  threshold acceptance at a tunable cutoff

rr and fsm redraw until a candidate's ASMD is at or below the threshold
(compared exactly, no slack) or the attempt budget runs out, in which case the
best-seen candidate is returned with status "exhausted".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metrics import asmd

CR = "cr"
RR = "rr"
FSM = "fsm"
DESIGN_KINDS = frozenset({CR, RR, FSM})

FIXED_HALF = "fixed_half"
BERNOULLI = "bernoulli"
ALLOCATIONS = frozenset({FIXED_HALF, BERNOULLI})

DEFAULT_RR_THRESHOLD = 0.1
DEFAULT_MAX_ATTEMPTS = 80

ACCEPTED = "accepted"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class DesignSpec:
    """Which design to run and with what acceptance parameters."""

    kind: str
    threshold: float | None = None
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    allocation: str = FIXED_HALF

    def __post_init__(self) -> None:
        if self.kind not in DESIGN_KINDS:
            raise ValueError(f"unknown design kind {self.kind!r}")
        if self.allocation not in ALLOCATIONS:
            raise ValueError(f"unknown allocation {self.allocation!r}")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if self.kind in (RR, FSM):
            if self.threshold is None:
                raise ValueError(f"{self.kind} design requires a threshold")
            if not math.isfinite(self.threshold) and self.threshold != float("inf"):
                raise ValueError(f"threshold must be a number, got {self.threshold!r}")
            if self.threshold <= 0.0:
                raise ValueError(f"threshold must be > 0, got {self.threshold!r}")

    @classmethod
    def cr(cls, allocation: str = FIXED_HALF) -> "DesignSpec":
        return cls(kind=CR, threshold=None, max_attempts=1, allocation=allocation)

    @classmethod
    def rr(
        cls,
        threshold: float = DEFAULT_RR_THRESHOLD,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        allocation: str = FIXED_HALF,
    ) -> "DesignSpec":
        return cls(kind=RR, threshold=threshold, max_attempts=max_attempts, allocation=allocation)

    @classmethod
    def fsm(
        cls,
        threshold: float,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        allocation: str = FIXED_HALF,
    ) -> "DesignSpec":
        return cls(kind=FSM, threshold=threshold, max_attempts=max_attempts, allocation=allocation)

    def label(self) -> str:
        """Stable text label used in outputs and derived seed tags."""
        if self.kind == CR:
            return CR
        return f"{self.kind}@{self.threshold:g}"


@dataclass
class Assignment:
    """One candidate assignment together with its balance diagnostics."""

    t: np.ndarray
    n1: int
    n0: int
    achieved_asmd: float
    attempts: int


@dataclass
class AssignmentOutcome:
    """Result of running a design: accepted candidate, or best seen on exhaustion."""

    status: str
    assignment: Assignment

    @property
    def accepted(self) -> bool:
        return self.status == ACCEPTED


def draw_candidate(n: int, allocation: str, rng: np.random.Generator) -> np.ndarray:
    """Draw one candidate assignment vector with both groups analyzable (>= 2)."""
    if allocation == FIXED_HALF:
        if n < 4 or n % 2 != 0:
            raise ValueError(f"fixed_half allocation needs even n >= 4, got {n}")
        t = np.zeros(n, dtype=np.int8)
        t[rng.permutation(n)[: n // 2]] = 1
        return t
    if allocation == BERNOULLI:
        if n < 4:
            raise ValueError(f"bernoulli allocation needs n >= 4, got {n}")
        while True:
            t = rng.integers(0, 2, size=n, dtype=np.int8)
            n1 = int(t.sum())
            if 2 <= n1 <= n - 2:
                return t
    raise ValueError(f"unknown allocation {allocation!r}")


def assign(x: np.ndarray, design: DesignSpec, rng: np.random.Generator) -> AssignmentOutcome:
    """Run the design's acceptance loop against the covariate matrix ``x``."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    limit = 1 if design.kind == CR else design.max_attempts
    best_t: np.ndarray | None = None
    best_value = math.inf
    for attempt in range(1, limit + 1):
        t = draw_candidate(n, design.allocation, rng)
        value = asmd(x, t)
        if design.kind == CR or value <= design.threshold:
            assignment = Assignment(
                t=t, n1=int(t.sum()), n0=n - int(t.sum()), achieved_asmd=value, attempts=attempt
            )
            return AssignmentOutcome(status=ACCEPTED, assignment=assignment)
        if value < best_value:
            best_value = value
            best_t = t
    assert best_t is not None
    assignment = Assignment(
        t=best_t,
        n1=int(best_t.sum()),
        n0=n - int(best_t.sum()),
        achieved_asmd=best_value,
        attempts=limit,
    )
    return AssignmentOutcome(status=EXHAUSTED, assignment=assignment)
