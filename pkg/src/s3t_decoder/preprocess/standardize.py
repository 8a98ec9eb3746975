"""Per-channel z-score standardization with training-set statistics."""

from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np

from s3t_decoder.errors import DataError, DegenerateChannelError, DimensionError, NumericError
from s3t_decoder.preprocess.trials import Trial

# Channels whose variance is below this fraction of their squared level count as flat.
_FLAT_TOLERANCE = 1e-20


@dataclass(frozen=True)
class StandardizationStats:
    """Per-channel mean and variance of a training split."""

    mean: np.ndarray
    variance: np.ndarray
    source: str = "train"

    @property
    def n_channels(self) -> int:
        return self.mean.shape[0]

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.variance)


def fit_standardization(trials: Sequence[Trial], source: str = "train") -> StandardizationStats:
    """Pool every training sample per channel into a mean and a variance.

    Raises:
        DataError: If fewer than two trials are given
        DegenerateChannelError: If a channel is flat across the training data
    """
    if len(trials) < 2:
        raise DataError(f"Standardization needs at least 2 training trials, got {len(trials)}")
    pooled = np.concatenate([trial.data for trial in trials], axis=1)
    mean = pooled.mean(axis=1)
    variance = pooled.var(axis=1)
    flat = np.flatnonzero(variance <= _FLAT_TOLERANCE * (1.0 + mean**2))
    if flat.size:
        raise DegenerateChannelError(
            f"Flat channel(s) {flat.tolist()} in training data; cannot standardize",
            channels=flat.tolist(),
        )
    return StandardizationStats(mean=mean, variance=variance, source=source)


def _check_channels(trial: Trial, stats: StandardizationStats) -> None:
    if trial.n_channels != stats.n_channels:
        raise DimensionError(
            f"Trial has {trial.n_channels} channels but statistics cover {stats.n_channels}"
        )


def standardize(trial: Trial, stats: StandardizationStats) -> Trial:
    """Apply ``X = (x - mu) / sqrt(sigma^2)`` channel by channel."""
    _check_channels(trial, stats)
    data = (trial.data - stats.mean[:, None]) / stats.std[:, None]
    if not np.isfinite(data).all():
        raise NumericError("Standardized trial contains non-finite values")
    return replace(trial, data=data)


def destandardize(trial: Trial, stats: StandardizationStats) -> Trial:
    """Invert ``standardize``."""
    _check_channels(trial, stats)
    return replace(trial, data=trial.data * stats.std[:, None] + stats.mean[:, None])
