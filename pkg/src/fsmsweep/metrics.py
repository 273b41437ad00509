"""Covariate balance and treatment effect metrics.

All functions take a binary assignment vector ``t`` (1 = treated) aligned with
the rows of the data and validate their group-size preconditions, raising
``ValueError`` on contract violations.
"""

from __future__ import annotations

import numpy as np

# Pooled per-covariate standard deviations below this floor make the
# standardized difference numerically meaningless; treat as a hard error.
DEGENERATE_SD_FLOOR = 1e-12


class DegenerateCovariateError(ValueError):
    """A covariate has (numerically) zero pooled spread, so ASMD is undefined."""


def _split_groups(t: np.ndarray, n: int, min_size: int) -> np.ndarray:
    t = np.asarray(t)
    if t.shape != (n,):
        raise ValueError(f"assignment length {t.shape} does not match {n} rows")
    if not np.all((t == 0) | (t == 1)):
        raise ValueError("assignment vector must be binary (0/1)")
    mask = t.astype(bool)
    n1 = int(mask.sum())
    if n1 < min_size or n - n1 < min_size:
        raise ValueError(
            f"each group needs at least {min_size} units, got n1={n1}, n0={n - n1}"
        )
    return mask


def asmd(x: np.ndarray, t: np.ndarray) -> float:
    """Average standardized mean difference across covariate columns.

    For column j the standardized difference is |mean1_j - mean0_j| / s_j with
    s_j = sqrt((s1_j^2 + s0_j^2) / 2) built from unbiased (n-1) group
    variances; the statistic is the unweighted mean over columns. A 1-d ``x``
    is treated as a single column.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2 or x.shape[1] < 1:
        raise ValueError(f"covariate matrix must be 2-d with >= 1 column, got shape {x.shape}")
    mask = _split_groups(t, x.shape[0], min_size=2)
    x1 = x[mask]
    x0 = x[~mask]
    mean_gap = np.abs(x1.mean(axis=0) - x0.mean(axis=0))
    pooled_sd = np.sqrt((x1.var(axis=0, ddof=1) + x0.var(axis=0, ddof=1)) / 2.0)
    degenerate = pooled_sd < DEGENERATE_SD_FLOOR
    if degenerate.any():
        j = int(np.argmax(degenerate))
        raise DegenerateCovariateError(
            f"covariate {j} has pooled sd {pooled_sd[j]:.3e} below {DEGENERATE_SD_FLOOR:g}"
        )
    return float(np.mean(mean_gap / pooled_sd))


def diff_in_means(y: np.ndarray, t: np.ndarray) -> float:
    """Treated-minus-control difference of outcome means."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError(f"outcome vector must be 1-d, got shape {y.shape}")
    mask = _split_groups(t, y.shape[0], min_size=1)
    return float(y[mask].mean() - y[~mask].mean())


def neyman_variance(y: np.ndarray, t: np.ndarray) -> float:
    """Conservative variance estimate s1^2/n1 + s0^2/n0 for the mean difference."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError(f"outcome vector must be 1-d, got shape {y.shape}")
    mask = _split_groups(t, y.shape[0], min_size=2)
    y1 = y[mask]
    y0 = y[~mask]
    return float(y1.var(ddof=1) / y1.size + y0.var(ddof=1) / y0.size)
