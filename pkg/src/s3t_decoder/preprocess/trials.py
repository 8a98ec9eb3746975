"""Trial containers shared by preprocessing, spatial filtering and training."""

from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from s3t_decoder.errors import DataError, DimensionError


@dataclass(frozen=True)
class Recording:
    """A continuous multi-channel recording, channels x samples."""

    data: np.ndarray
    fs: float
    subject_id: str = ""

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class Trial:
    """One segmented EEG window (channels x time samples) with its class label."""

    data: np.ndarray
    label: int
    subject_id: str = ""
    fs: float = 250.0

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]


@dataclass
class TrialSet:
    """An ordered collection of equally shaped trials from one subject."""

    fs: float
    n_classes: int
    trials: list[Trial] = field(default_factory=list)
    subject_id: str = ""
    n_channels: int | None = None
    n_samples: int | None = None

    def __post_init__(self):
        if self.trials:
            first = self.trials[0]
            self.n_channels = self.n_channels or first.n_channels
            self.n_samples = self.n_samples or first.n_samples
        for index, trial in enumerate(self.trials):
            if trial.data.shape != (self.n_channels, self.n_samples):
                raise DimensionError(
                    f"Trial {index} has shape {trial.data.shape}, "
                    f"expected {(self.n_channels, self.n_samples)}"
                )
            if not 0 <= trial.label < self.n_classes:
                raise DataError(
                    f"Trial {index} has label {trial.label} outside [0, {self.n_classes})"
                )

    @classmethod
    def from_arrays(
        cls,
        data: np.ndarray,
        labels: Sequence[int],
        *,
        fs: float,
        n_classes: int,
        subject_id: str = "",
    ) -> "TrialSet":
        """Build a set from an ``(M, C, T)`` array and ``M`` labels."""
        data = np.asarray(data, dtype=np.float64)
        trials = [
            Trial(data=data[i], label=int(label), subject_id=subject_id, fs=fs)
            for i, label in enumerate(labels)
        ]
        n_channels, n_samples = (data.shape[1], data.shape[2]) if data.ndim == 3 else (None, None)
        return cls(
            fs=fs,
            n_classes=n_classes,
            trials=trials,
            subject_id=subject_id,
            n_channels=n_channels,
            n_samples=n_samples,
        )

    def __len__(self) -> int:
        return len(self.trials)

    def __iter__(self) -> Iterator[Trial]:
        return iter(self.trials)

    def __getitem__(self, index: int) -> Trial:
        return self.trials[index]

    @property
    def data(self) -> np.ndarray:
        """Stacked trial data of shape ``(M, C, T)``."""
        if not self.trials:
            return np.zeros((0, self.n_channels or 0, self.n_samples or 0))
        return np.stack([trial.data for trial in self.trials])

    @property
    def labels(self) -> np.ndarray:
        return np.array([trial.label for trial in self.trials], dtype=np.int64)

    def subset(self, indices: Sequence[int]) -> "TrialSet":
        return TrialSet(
            fs=self.fs,
            n_classes=self.n_classes,
            trials=[self.trials[i] for i in indices],
            subject_id=self.subject_id,
            n_channels=self.n_channels,
            n_samples=self.n_samples,
        )

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)
