"""Deterministic seed derivation.

Every replication gets its own SeedSequence with entropy
``[master_seed, scenario_code, n, replication_index]``, spawned into one child
stream for sample generation and one for assignment draws. The assignment
child does not depend on the design or its threshold, so every design sees the
same candidate sequence for a given replication; acceptance events at nested
thresholds are then nested by construction.

Auxiliary streams (bootstrap, splits) hash a text tag through sha256 so that
unrelated consumers cannot collide.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stable_hash_int(tag: str) -> int:
    """First 8 bytes of sha256(tag), as an unsigned integer."""
    return int.from_bytes(hashlib.sha256(tag.encode("utf8")).digest()[:8], "big")


def replication_seed(
    master_seed: int, scenario_code: int, n: int, replication_index: int
) -> np.random.SeedSequence:
    """SeedSequence for one replication of one (scenario, n) cell family."""
    for name, value in (
        ("master_seed", master_seed),
        ("scenario_code", scenario_code),
        ("n", n),
        ("replication_index", replication_index),
    ):
        if not isinstance(value, (int, np.integer)) or value < 0:
            raise ValueError(f"{name} must be a nonnegative integer, got {value!r}")
    return np.random.SeedSequence(
        entropy=[int(master_seed), int(scenario_code), int(n), int(replication_index)]
    )


def replication_streams(
    master_seed: int, scenario_code: int, n: int, replication_index: int
) -> tuple[np.random.Generator, np.random.Generator]:
    """(sample stream, assignment stream) for one replication."""
    sample_ss, assign_ss = replication_seed(
        master_seed, scenario_code, n, replication_index
    ).spawn(2)
    return (
        np.random.Generator(np.random.PCG64(sample_ss)),
        np.random.Generator(np.random.PCG64(assign_ss)),
    )


def tagged_stream(master_seed: int, tag: str) -> np.random.Generator:
    """Named auxiliary stream (bootstrap resampling, split shuffling, ...)."""
    ss = np.random.SeedSequence(entropy=[int(master_seed), stable_hash_int(tag)])
    return np.random.Generator(np.random.PCG64(ss))
