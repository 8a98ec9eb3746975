"""Cross-entropy objective over predicted class probabilities."""

import numpy as np

from s3t_decoder.config import constants
from s3t_decoder.errors import DataError
from s3t_decoder.numcore import DiffTensor, log, mul, sum_all, take_labels


def validate_labels(labels, n_classes: int) -> np.ndarray:
    """Return labels as an int array, rejecting anything outside ``[0, n_classes)``."""
    array = np.asarray(labels)
    if array.ndim != 1 or not np.issubdtype(array.dtype, np.integer):
        raise DataError(f"Labels must be a 1-D integer sequence, got {array.dtype} {array.shape}")
    invalid = array[(array < 0) | (array >= n_classes)]
    if invalid.size:
        raise DataError(f"Invalid label(s) {sorted(set(invalid.tolist()))} for {n_classes} classes")
    return array.astype(np.int64)


def cross_entropy(
    probabilities: DiffTensor, labels, floor: float = constants.LOG_FLOOR
) -> DiffTensor:
    """Mean negative log-likelihood of the true classes; the log is clamped below at ``floor``.

    Args:
        probabilities: (M, N) row-stochastic predictions
        labels: M class indices

    Raises:
        DataError: If any label is outside ``[0, N)`` or the counts disagree
    """
    n_trials, n_classes = probabilities.shape
    labels = validate_labels(labels, n_classes)
    if labels.shape[0] != n_trials:
        raise DataError(f"{labels.shape[0]} labels for {n_trials} predictions")
    picked = take_labels(probabilities, labels)
    return mul(sum_all(log(picked, floor)), -1.0 / n_trials)
