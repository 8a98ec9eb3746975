"""Paired two-sided Wilcoxon signed-rank test over per-subject accuracies."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

from s3t_decoder.errors import DataError

MIN_PAIRS = 5
EXACT_LIMIT = 20


@dataclass(frozen=True)
class WilcoxonResult:
    """``statistic`` is the rank sum of the positive differences ``a - b``."""

    statistic: float
    p_value: float
    n_used: int
    method: str
    degenerate: bool = False


def _exact_p_value(doubled_ranks: np.ndarray, doubled_statistic: int) -> float:
    """Two-sided p-value from the full null distribution of the signed-rank sum.

    Ranks are doubled so that midranks of tied magnitudes stay integral.
    """
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for rank in doubled_ranks:
        shifted = np.zeros_like(counts)
        shifted[rank:] = counts[: total + 1 - rank]
        counts = counts + shifted
    probabilities = counts / counts.sum()
    lower = probabilities[: doubled_statistic + 1].sum()
    upper = probabilities[doubled_statistic:].sum()
    return float(min(1.0, 2.0 * min(lower, upper)))


def _normal_p_value(ranks: np.ndarray, statistic: float, magnitudes: np.ndarray) -> float:
    n = len(ranks)
    expected = n * (n + 1) / 4.0
    _, tie_counts = np.unique(magnitudes, return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_counts**3 - tie_counts) / 48.0
    if variance <= 0:
        return 1.0
    z = (statistic - expected) / np.sqrt(variance)
    return float(min(1.0, 2.0 * norm.sf(abs(z))))


def wilcoxon_signed_rank(a, b) -> WilcoxonResult:
    """Compare two paired accuracy vectors.

    Zero differences are discarded; tied magnitudes get their average rank. The
    exact null distribution is used up to ``EXACT_LIMIT`` non-zero pairs, otherwise
    a tie-corrected normal approximation without continuity correction.

    Raises:
        DataError: If the vectors differ in length or hold fewer than ``MIN_PAIRS`` pairs
    """
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError(f"Paired samples must be 1-D of equal length, got {a.shape} and {b.shape}")
    if a.size < MIN_PAIRS:
        raise DataError(f"Wilcoxon test needs at least {MIN_PAIRS} pairs, got {a.size}")

    differences = a - b
    differences = differences[differences != 0]
    if differences.size == 0:
        return WilcoxonResult(statistic=0.0, p_value=1.0, n_used=0, method="exact", degenerate=True)

    magnitudes = np.abs(differences)
    ranks = rankdata(magnitudes)
    statistic = float(ranks[differences > 0].sum())
    if differences.size <= EXACT_LIMIT:
        doubled = np.rint(2 * ranks).astype(np.int64)
        p_value = _exact_p_value(doubled, int(round(2 * statistic)))
        method = "exact"
    else:
        p_value = _normal_p_value(ranks, statistic, magnitudes)
        method = "normal"
    return WilcoxonResult(
        statistic=statistic, p_value=p_value, n_used=int(differences.size), method=method
    )
