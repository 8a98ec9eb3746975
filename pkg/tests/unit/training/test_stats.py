"""Unit tests for the Wilcoxon signed-rank test."""

import itertools

import numpy as np
import pytest
from scipy.stats import rankdata
from scipy.stats import wilcoxon as scipy_wilcoxon

from s3t_decoder.errors import DataError
from s3t_decoder.training import wilcoxon_signed_rank


def _brute_force_p(a, b) -> float:
    differences = np.asarray(a) - np.asarray(b)
    differences = differences[differences != 0]
    ranks = rankdata(np.abs(differences))
    observed = ranks[differences > 0].sum()
    sums = np.array(
        [
            sum(rank for rank, positive in zip(ranks, signs, strict=True) if positive)
            for signs in itertools.product((False, True), repeat=len(ranks))
        ]
    )
    lower = np.mean(sums <= observed + 1e-9)
    upper = np.mean(sums >= observed - 1e-9)
    return min(1.0, 2 * min(lower, upper))


def test_identical_samples_are_degenerate():
    a = [80.0, 70.0, 90.0, 60.0, 75.0]
    result = wilcoxon_signed_rank(a, a)
    assert result.p_value == 1.0
    assert result.degenerate


def test_constant_shift_over_nine_subjects():
    b = np.array([67.8, 55.2, 81.3, 61.0, 55.0, 45.3, 82.8, 81.3, 70.8])
    result = wilcoxon_signed_rank(b + 10.0, b)
    assert result.method == "exact"
    assert result.p_value == pytest.approx(2 / 512)
    assert result.statistic == 45.0


def test_swapping_samples_keeps_p_value():
    rng = np.random.default_rng(0)
    a, b = rng.normal(80, 10, 9), rng.normal(75, 10, 9)
    assert wilcoxon_signed_rank(a, b).p_value == pytest.approx(wilcoxon_signed_rank(b, a).p_value)


def test_exact_matches_enumeration():
    """20 random paired samples of 9 subjects each."""
    rng = np.random.default_rng(1)
    for _ in range(20):
        a, b = rng.normal(80, 10, 9), rng.normal(78, 10, 9)
        assert wilcoxon_signed_rank(a, b).p_value == pytest.approx(_brute_force_p(a, b), abs=1e-12)


def test_exact_handles_ties():
    a = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0])
    b = np.array([0.0, 3.0, 2.0, 3.0, 5.0, 4.0, 9.0])
    assert wilcoxon_signed_rank(a, b).p_value == pytest.approx(_brute_force_p(a, b), abs=1e-12)


def test_normal_approximation_for_large_samples():
    rng = np.random.default_rng(2)
    a, b = rng.normal(0.3, 1, 30), rng.normal(0, 1, 30)
    result = wilcoxon_signed_rank(a, b)
    assert result.method == "normal"
    reference = scipy_wilcoxon(a, b, correction=False, method="approx")
    assert result.p_value == pytest.approx(reference.pvalue, rel=1e-9)


def test_input_validation():
    with pytest.raises(DataError):
        wilcoxon_signed_rank([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 5.0])
    with pytest.raises(DataError):
        wilcoxon_signed_rank([1.0] * 6, [1.0] * 5)
