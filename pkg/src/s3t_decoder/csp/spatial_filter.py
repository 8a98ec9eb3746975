"""One-versus-rest common spatial pattern filters.

Each OVR task whitens the composite covariance of the 'one' class and the 'rest',
diagonalizes the whitened 'rest' covariance, and keeps the rows that carry the most
'one' variance. The sub-filters are stacked into W and applied as ``Z = W X``.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from s3t_decoder.config import constants
from s3t_decoder.errors import ConfigurationError, DataError, DimensionError, NumericError
from s3t_decoder.log_messages import LOG_CSP_FIT, LOG_CSP_ILL_CONDITIONED, LOG_CSP_REGULARIZED
from s3t_decoder.logger import Logger
from s3t_decoder.preprocess.trials import Trial

_SYMMETRY_TOLERANCE = 1e-10
# Eigenvalues closer than this (relative to the largest) are treated as ties.
_TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class OvrSubfilter:
    """The S leading rows of ``B^T P`` for one 'one-versus-rest' split."""

    projection: np.ndarray
    one_class: int
    eigvals_one: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.projection.shape[0]


@dataclass(frozen=True)
class SpatialFilter:
    """Stacked OVR sub-filters, ``W`` of shape ``(n_subfilters * S, C_eeg)``."""

    W: np.ndarray
    subfilters: tuple[OvrSubfilter, ...]
    class_order: tuple[int, ...]

    @classmethod
    def from_subfilters(cls, subfilters: Sequence[OvrSubfilter]) -> "SpatialFilter":
        return cls(
            W=np.vstack([subfilter.projection for subfilter in subfilters]),
            subfilters=tuple(subfilters),
            class_order=tuple(subfilter.one_class for subfilter in subfilters),
        )

    @property
    def n_feature_channels(self) -> int:
        return self.W.shape[0]

    @property
    def n_channels(self) -> int:
        return self.W.shape[1]


def trial_covariance(trial: Trial | np.ndarray) -> np.ndarray:
    """Sample covariance of the channel rows of one trial."""
    data = trial.data if isinstance(trial, Trial) else np.asarray(trial)
    n_channels, n_samples = data.shape
    if n_samples <= n_channels:
        Logger.print_warning(
            LOG_CSP_ILL_CONDITIONED.format(n_samples=n_samples, n_channels=n_channels)
        )
    centered = data - data.mean(axis=1, keepdims=True)
    return centered @ centered.T / (n_samples - 1)


def class_mean_cov(
    trials: Sequence[Trial],
    class_set: Callable[[int], bool],
    covariances: Sequence[np.ndarray] | None = None,
) -> np.ndarray:
    """Average the covariances of every trial whose label satisfies ``class_set``.

    Args:
        trials: Candidate trials
        class_set: Predicate on the class label
        covariances: Precomputed per-trial covariances, aligned with ``trials``

    Raises:
        DataError: If no trial matches
    """
    if covariances is None:
        covariances = [trial_covariance(trial) for trial in trials]
    selected = [cov for trial, cov in zip(trials, covariances, strict=True) if class_set(trial.label)]
    if not selected:
        raise DataError("No trial matches the requested class set")
    return np.mean(selected, axis=0)


def _canonical_eigenvectors(eigvals: np.ndarray, eigvecs: np.ndarray) -> np.ndarray:
    """Fix signs (first nonzero component positive) and order tied eigenvectors."""
    eigvecs = eigvecs.copy()
    for column in range(eigvecs.shape[1]):
        vector = eigvecs[:, column]
        nonzero = np.flatnonzero(np.abs(vector) > _TIE_TOLERANCE)
        if nonzero.size and vector[nonzero[0]] < 0:
            eigvecs[:, column] = -vector

    scale = max(np.abs(eigvals).max(), 1.0)
    start = 0
    while start < len(eigvals):
        stop = start + 1
        while stop < len(eigvals) and abs(eigvals[stop] - eigvals[start]) <= _TIE_TOLERANCE * scale:
            stop += 1
        if stop - start > 1:
            block = eigvecs[:, start:stop]
            order = sorted(range(block.shape[1]), key=lambda i: tuple(-block[:, i]))
            eigvecs[:, start:stop] = block[:, order]
        start = stop
    return eigvecs


def _check_symmetric(matrix: np.ndarray, label: str) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"{label} must be square, got shape {matrix.shape}")
    scale = max(np.abs(matrix).max(), 1.0)
    if np.abs(matrix - matrix.T).max() > _SYMMETRY_TOLERANCE * scale:
        raise DataError(f"{label} is not symmetric")


def whitening_matrix(
    composite: np.ndarray, regularization: float = constants.CSP_REGULARIZATION
) -> np.ndarray:
    """``P = Lambda^(-1/2) U^T`` for ``R = U Lambda U^T`` with Lambda descending.

    A ridge of ``regularization * trace(R) / C`` is added only when the smallest
    eigenvalue of R does not exceed it.

    Raises:
        NumericError: If R is not positive definite after regularization
    """
    n_channels = composite.shape[0]
    ridge = regularization * np.trace(composite) / n_channels
    eigvals, eigvecs = eigh(composite)
    if eigvals[0] <= ridge:
        Logger.print_debug(LOG_CSP_REGULARIZED.format(ridge=ridge))
        eigvals, eigvecs = eigh(composite + ridge * np.eye(n_channels))
    if not np.all(np.isfinite(eigvals)) or eigvals[0] <= 0:
        raise NumericError("Composite covariance R1 + R2 is not positive definite")
    eigvals, eigvecs = eigvals[::-1], eigvecs[:, ::-1]
    eigvecs = _canonical_eigenvectors(eigvals, eigvecs)
    return np.diag(eigvals**-0.5) @ eigvecs.T


def build_subfilter(
    R1: np.ndarray,
    R2: np.ndarray,
    S: int,
    one_class: int = 0,
    regularization: float = constants.CSP_REGULARIZATION,
) -> OvrSubfilter:
    """Jointly diagonalize the 'one' covariance R1 and the 'rest' covariance R2.

    Args:
        R1: Mean covariance of the 'one' class
        R2: Mean covariance of the remaining classes
        S: Number of rows kept
        one_class: Label of the 'one' class, stored for provenance
        regularization: Relative ridge used when R1 + R2 is numerically singular

    Returns:
        The S rows of ``B^T P`` with the largest ``1 - Lambda_S`` values

    Raises:
        DataError: If R1 or R2 is not symmetric
        ConfigurationError: If S is outside ``[1, C_eeg]``
        NumericError: If R1 + R2 is not positive definite
    """
    R1, R2 = np.asarray(R1, dtype=np.float64), np.asarray(R2, dtype=np.float64)
    _check_symmetric(R1, "R1")
    _check_symmetric(R2, "R2")
    if R1.shape != R2.shape:
        raise DimensionError(f"R1 {R1.shape} and R2 {R2.shape} differ in shape")
    n_channels = R1.shape[0]
    if not 1 <= S <= n_channels:
        raise ConfigurationError(f"S must lie in [1, {n_channels}], got {S}")

    P = whitening_matrix(R1 + R2, regularization)
    S2 = P @ R2 @ P.T
    S2 = 0.5 * (S2 + S2.T)
    eigvals_rest, B = eigh(S2)
    B = _canonical_eigenvectors(eigvals_rest, B)
    full = B.T @ P
    return OvrSubfilter(
        projection=full[:S].copy(),
        one_class=one_class,
        eigvals_one=1.0 - eigvals_rest[:S],
    )


def fit_ovr_filter(
    trials: Sequence[Trial],
    N: int,
    S: int,
    regularization: float = constants.CSP_REGULARIZATION,
) -> SpatialFilter:
    """Fit one sub-filter per class against the rest and stack them.

    Binary tasks run a single OVR split (class 0 against class 1).

    Raises:
        ConfigurationError: If N < 2
        DataError: Naming any class absent from ``trials``
    """
    if N < 2:
        raise ConfigurationError(f"OVR-CSP needs at least 2 classes, got {N}")
    present = {trial.label for trial in trials}
    missing = [label for label in range(N) if label not in present]
    if missing:
        raise DataError(f"Class(es) {missing} missing from the training trials")

    covariances = [trial_covariance(trial) for trial in trials]
    class_order = [0] if N == 2 else list(range(N))
    subfilters = []
    for one_class in class_order:
        R1 = class_mean_cov(trials, lambda label, c=one_class: label == c, covariances)
        R2 = class_mean_cov(trials, lambda label, c=one_class: label != c, covariances)
        subfilters.append(build_subfilter(R1, R2, S, one_class, regularization))

    spatial_filter = SpatialFilter.from_subfilters(subfilters)
    Logger.print_debug(
        LOG_CSP_FIT.format(n_subfilters=len(subfilters), shape=spatial_filter.W.shape)
    )
    return spatial_filter


def apply_filter(spatial_filter: SpatialFilter | np.ndarray, trial: Trial | np.ndarray) -> np.ndarray:
    """``Z = W X``; the temporal axis is untouched.

    Accepts a single trial ``(C_eeg, T)`` or a stack ``(M, C_eeg, T)``.

    Raises:
        DimensionError: If W's column count differs from the channel count
    """
    W = spatial_filter.W if isinstance(spatial_filter, SpatialFilter) else np.asarray(spatial_filter)
    data = trial.data if isinstance(trial, Trial) else np.asarray(trial, dtype=np.float64)
    if data.ndim < 2 or W.shape[1] != data.shape[-2]:
        raise DimensionError(f"Filter {W.shape} cannot be applied to data of shape {data.shape}")
    return np.matmul(W, data)
