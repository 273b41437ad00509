"""Unit tests for balance and effect metrics against hand-computed values."""

from __future__ import annotations

import numpy as np
import pytest

from fsmsweep.metrics import (
    DegenerateCovariateError,
    asmd,
    diff_in_means,
    neyman_variance,
)

# Hand-computed reference values, frozen before the implementation was written.
#
# asmd, single covariate x = (1, 2, 3, 4), t = (1, 1, 0, 0):
#   treated {1, 2}: mean 1.5, var 0.5; control {3, 4}: mean 3.5, var 0.5
#   s = sqrt((0.5 + 0.5) / 2) = sqrt(0.5), asmd = 2 / sqrt(0.5)
ASMD_1COL = 2.8284271247461903
# Second covariate column (5, 1, 2, 0), same t:
#   treated {5, 1}: mean 3, var 8; control {2, 0}: mean 1, var 2
#   s = sqrt(5), smd = 2 / sqrt(5)
ASMD_2COL_MEAN = (2.8284271247461903 + 0.8944271909999159) / 2.0
# neyman_variance, y = (3, 5, 1, 2), t = (1, 0, 1, 0):
#   treated {3, 1}: var 2, n1 = 2; control {5, 2}: var 4.5, n0 = 2
#   2/2 + 4.5/2 = 3.25
NEYMAN_REF = 3.25

RTOL = 1e-12


def test_asmd_hand_value_single_covariate() -> None:
    value = asmd(np.array([1.0, 2.0, 3.0, 4.0]), np.array([1, 1, 0, 0]))
    assert value == pytest.approx(ASMD_1COL, rel=RTOL)


def test_asmd_hand_value_two_covariates_averages_columns() -> None:
    x = np.array([[1.0, 5.0], [2.0, 1.0], [3.0, 2.0], [4.0, 0.0]])
    t = np.array([1, 1, 0, 0])
    assert asmd(x, t) == pytest.approx(ASMD_2COL_MEAN, rel=RTOL)
    per_column = [asmd(x[:, j], t) for j in range(2)]
    assert asmd(x, t) == pytest.approx(sum(per_column) / 2.0, rel=RTOL)


def test_asmd_zero_when_group_means_identical() -> None:
    value = asmd(np.array([1.0, 2.0, 1.0, 2.0]), np.array([1, 1, 0, 0]))
    assert value == 0.0


def test_asmd_complement_invariant() -> None:
    rng = np.random.default_rng(7)
    x = rng.normal(size=(12, 3))
    t = np.array([1, 0] * 6)
    assert asmd(x, t) == asmd(x, 1 - t)


def test_asmd_affine_invariant_per_column() -> None:
    rng = np.random.default_rng(11)
    x = rng.normal(size=(20, 4))
    t = np.array([1, 0] * 10)
    scaled = x * np.array([2.0, -3.0, 0.5, 10.0]) + np.array([1.0, 0.0, -5.0, 100.0])
    assert asmd(scaled, t) == pytest.approx(asmd(x, t), rel=RTOL)


def test_asmd_scales_with_mean_separation() -> None:
    # Doubling the gap between groups while keeping within-group spread fixed
    # doubles the statistic.
    base = np.array([0.0, 1.0, 10.0, 11.0])
    wide = np.array([0.0, 1.0, 20.0, 21.0])
    t = np.array([1, 1, 0, 0])
    assert asmd(wide, t) == pytest.approx(2.0 * asmd(base, t), rel=RTOL)


def test_asmd_degenerate_covariate_raises() -> None:
    x = np.array([[1.0, 3.0], [2.0, 3.0], [3.0, 3.0], [4.0, 3.0]])
    t = np.array([1, 1, 0, 0])
    with pytest.raises(DegenerateCovariateError):
        asmd(x, t)


def test_asmd_rejects_small_groups() -> None:
    with pytest.raises(ValueError):
        asmd(np.array([1.0, 2.0, 3.0, 4.0]), np.array([1, 0, 0, 0]))


def test_asmd_rejects_nonbinary_assignment() -> None:
    with pytest.raises(ValueError):
        asmd(np.array([1.0, 2.0, 3.0, 4.0]), np.array([1, 2, 0, 0]))


def test_asmd_rejects_length_mismatch() -> None:
    with pytest.raises(ValueError):
        asmd(np.array([1.0, 2.0, 3.0]), np.array([1, 1, 0, 0]))


def test_diff_in_means_hand_value() -> None:
    value = diff_in_means(np.array([3.0, 5.0, 1.0, 2.0]), np.array([1, 0, 1, 0]))
    assert value == pytest.approx(-1.5, rel=RTOL)


def test_diff_in_means_antisymmetric_in_complement() -> None:
    rng = np.random.default_rng(3)
    y = rng.normal(size=14)
    t = np.array([1, 0] * 7)
    assert diff_in_means(y, 1 - t) == pytest.approx(-diff_in_means(y, t), rel=RTOL)


def test_diff_in_means_requires_nonempty_groups() -> None:
    with pytest.raises(ValueError):
        diff_in_means(np.array([1.0, 2.0]), np.array([1, 1]))


def test_neyman_variance_hand_value() -> None:
    value = neyman_variance(np.array([3.0, 5.0, 1.0, 2.0]), np.array([1, 0, 1, 0]))
    assert value == pytest.approx(NEYMAN_REF, rel=RTOL)


def test_neyman_variance_shift_invariant() -> None:
    rng = np.random.default_rng(5)
    y = rng.normal(size=16)
    t = np.array([1, 0] * 8)
    assert neyman_variance(y + 100.0, t) == pytest.approx(neyman_variance(y, t), rel=RTOL)
    assert neyman_variance(y, 1 - t) == pytest.approx(neyman_variance(y, t), rel=RTOL)


def test_neyman_variance_positive_for_nonconstant_outcomes() -> None:
    rng = np.random.default_rng(9)
    y = rng.normal(size=10)
    t = np.array([1, 0] * 5)
    assert neyman_variance(y, t) > 0.0


def test_neyman_variance_requires_two_per_group() -> None:
    with pytest.raises(ValueError):
        neyman_variance(np.array([1.0, 2.0, 3.0]), np.array([1, 0, 0]))
