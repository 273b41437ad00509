"""Run configuration: defaults, TOML loading, validation.

A RunConfig is the single source of truth for a sweep: scenarios, sample
sizes, threshold grid, replication budget, seeds, and output location. The
two seeds are separate on purpose: ``master_seed`` drives every sample and
assignment stream, ``split_seed`` only shuffles the train/test partition, so
re-splitting never perturbs the simulated data.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .designs import ALLOCATIONS, DEFAULT_MAX_ATTEMPTS, DEFAULT_RR_THRESHOLD, FIXED_HALF
from .dgp import BASELINE, SCENARIO_KINDS
from .engine import DEFAULT_BOOTSTRAP_B, DEFAULT_EPSILON_GRID, DEFAULT_P, GridSpec

DEFAULT_MASTER_SEED = 20240801
DEFAULT_SPLIT_SEED = 20240802
DEFAULT_R = 1000
DEFAULT_SAMPLE_SIZES = (100, 300, 500)
DEFAULT_MIN_ACCEPT = (0.01, 0.05)


@dataclass(frozen=True)
class RunConfig:
    """Everything a sweep needs, with reproducible defaults."""

    scenarios: tuple[str, ...] = (BASELINE,)
    sample_sizes: tuple[int, ...] = DEFAULT_SAMPLE_SIZES
    epsilon_grid: tuple[float, ...] = DEFAULT_EPSILON_GRID
    r: int = DEFAULT_R
    p: int = DEFAULT_P
    master_seed: int = DEFAULT_MASTER_SEED
    split_seed: int = DEFAULT_SPLIT_SEED
    bootstrap_b: int = DEFAULT_BOOTSTRAP_B
    min_accept: tuple[float, ...] = DEFAULT_MIN_ACCEPT
    rr_threshold: float = DEFAULT_RR_THRESHOLD
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    allocation: str = FIXED_HALF
    workers: int = 1
    out_dir: str = "results"

    def __post_init__(self) -> None:
        if not self.scenarios:
            raise ValueError("scenarios must not be empty")
        for kind in self.scenarios:
            if kind not in SCENARIO_KINDS:
                raise ValueError(
                    f"unknown scenario {kind!r}; expected one of {sorted(SCENARIO_KINDS)}"
                )
        if len(set(self.scenarios)) != len(self.scenarios):
            raise ValueError("scenarios must be distinct")
        if not self.sample_sizes:
            raise ValueError("sample_sizes must not be empty")
        for n in self.sample_sizes:
            if n < 4:
                raise ValueError(f"sample sizes must be >= 4, got {n}")
        GridSpec(epsilons=self.epsilon_grid)  # strictly increasing, positive
        if self.r < 2:
            raise ValueError(f"r must be >= 2, got {self.r}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.master_seed < 0 or self.split_seed < 0:
            raise ValueError("seeds must be nonnegative")
        if self.bootstrap_b < 2:
            raise ValueError(f"bootstrap_b must be >= 2, got {self.bootstrap_b}")
        for floor in self.min_accept:
            if not 0.0 <= floor <= 1.0:
                raise ValueError(f"min_accept entries must lie in [0, 1], got {floor!r}")
        if self.rr_threshold <= 0:
            raise ValueError(f"rr_threshold must be > 0, got {self.rr_threshold}")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if self.allocation not in ALLOCATIONS:
            raise ValueError(
                f"unknown allocation {self.allocation!r}; expected one of {sorted(ALLOCATIONS)}"
            )
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    @property
    def grid(self) -> GridSpec:
        return GridSpec(epsilons=self.epsilon_grid)

    def to_dict(self) -> dict:
        return asdict(self)


_SEQUENCE_FIELDS = {"scenarios", "sample_sizes", "epsilon_grid", "min_accept"}


def config_from_mapping(raw: dict) -> RunConfig:
    """Build a RunConfig from a plain mapping, rejecting unknown keys."""
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        if key in _SEQUENCE_FIELDS:
            if not isinstance(value, (list, tuple)):
                raise ValueError(f"config key {key!r} must be a list")
            value = tuple(value)
        kwargs[key] = value
    return RunConfig(**kwargs)


def load_config(path: str | Path) -> RunConfig:
    """Load a RunConfig from a TOML file."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    try:
        return config_from_mapping(raw)
    except (TypeError, ValueError) as err:
        raise ValueError(f"{path}: {err}") from err
