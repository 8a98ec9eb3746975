"""Seeded synthetic motor-imagery-like trials with class-dependent covariances.

Each class k mixes C band-limited sources through its own matrix A_k. The sources
of class k oscillate around a class rhythm frequency and carry class-specific
variances, so class covariances differ and CSP can separate them.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, sosfiltfilt

from s3t_decoder.config import constants
from s3t_decoder.errors import ConfigurationError
from s3t_decoder.preprocess import Trial, TrialSet

# Half-width of each source's pass band, in Hz.
SOURCE_BANDWIDTH_HZ = 2.0
SOURCE_FILTER_ORDER = 2
# Samples discarded at each end of the generated noise before trimming to T.
_EDGE = 64


@dataclass
class SynthSpec:
    """Parameters of a synthetic trial set.

    ``source_variances[k][i]`` is the variance of source i in class k. When omitted,
    class k boosts source ``k mod C`` to ``amplitude**2`` and leaves the rest at 1.
    ``mixing_seed=None`` uses the identity mixing for every class.
    """

    n_classes: int = 4
    trials_per_class: int = 40
    n_channels: int = 8
    n_samples: int = 200
    fs: float = 100.0
    frequencies: list[float] | None = None
    amplitude: float = 3.0
    source_variances: list[list[float]] | None = None
    mixing_seed: int | None = None
    mixing_strength: float = 0.3
    noise_sigma: float = 0.1
    seed: int = 0
    subject_id: str = "synthetic"

    def class_frequencies(self) -> list[float]:
        if self.frequencies is not None:
            return [float(f) for f in self.frequencies]
        return np.linspace(8.0, 30.0, self.n_classes).tolist()

    def class_variances(self, k: int) -> np.ndarray:
        if self.source_variances is not None:
            return np.asarray(self.source_variances[k], dtype=np.float64)
        variances = np.ones(self.n_channels)
        variances[k % self.n_channels] = self.amplitude**2
        return variances

    def validate(self) -> None:
        """Raises ConfigurationError naming the first invalid setting."""
        if self.n_classes < 2:
            raise ConfigurationError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.trials_per_class < 0 or self.n_channels < 1 or self.n_samples < 1:
            raise ConfigurationError("trials_per_class, n_channels and n_samples must be positive")
        if self.noise_sigma < 0:
            raise ConfigurationError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        frequencies = self.class_frequencies()
        if len(frequencies) != self.n_classes:
            raise ConfigurationError(
                f"{len(frequencies)} frequencies given for {self.n_classes} classes"
            )
        for frequency in frequencies:
            if not constants.BAND_LOW_HZ < frequency < constants.BAND_HIGH_HZ:
                raise ConfigurationError(
                    f"Invalid frequency {frequency} Hz; class rhythms must lie in "
                    f"({constants.BAND_LOW_HZ}, {constants.BAND_HIGH_HZ}) Hz"
                )
            if frequency + SOURCE_BANDWIDTH_HZ >= self.fs / 2:
                raise ConfigurationError(
                    f"Invalid frequency {frequency} Hz for fs={self.fs} Hz (Nyquist violation)"
                )
        if self.source_variances is not None:
            shape = np.shape(self.source_variances)
            if shape != (self.n_classes, self.n_channels) or np.min(self.source_variances) < 0:
                raise ConfigurationError(
                    f"source_variances must be non-negative with shape "
                    f"({self.n_classes}, {self.n_channels}), got {shape}"
                )


def mixing_matrix(spec: SynthSpec, k: int) -> np.ndarray:
    """A_k: identity without a mixing seed, otherwise ``I + strength * noise`` per class."""
    if spec.mixing_seed is None:
        return np.eye(spec.n_channels)
    rng = np.random.default_rng([spec.mixing_seed, k])
    return np.eye(spec.n_channels) + spec.mixing_strength * rng.standard_normal(
        (spec.n_channels, spec.n_channels)
    )


def band_limited_sources(
    rng: np.random.Generator, n_sources: int, n_samples: int, frequency: float, fs: float
) -> np.ndarray:
    """Unit-variance, zero-mean sources band-passed around ``frequency``."""
    sos = butter(
        SOURCE_FILTER_ORDER,
        [frequency - SOURCE_BANDWIDTH_HZ, frequency + SOURCE_BANDWIDTH_HZ],
        btype="bandpass",
        fs=fs,
        output="sos",
    )
    white = rng.standard_normal((n_sources, n_samples + 2 * _EDGE))
    sources = sosfiltfilt(sos, white, axis=-1)[:, _EDGE : _EDGE + n_samples]
    sources -= sources.mean(axis=1, keepdims=True)
    return sources / sources.std(axis=1, keepdims=True)


def generate_synthetic(spec: SynthSpec) -> TrialSet:
    """Generate ``trials_per_class`` trials of every class, class by class.

    Raises:
        ConfigurationError: If a class frequency is outside the retained band
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    trials = []
    for k, frequency in enumerate(spec.class_frequencies()):
        mixing = mixing_matrix(spec, k)
        scale = np.sqrt(spec.class_variances(k))[:, None]
        for _ in range(spec.trials_per_class):
            sources = scale * band_limited_sources(
                rng, spec.n_channels, spec.n_samples, frequency, spec.fs
            )
            noise = spec.noise_sigma * rng.standard_normal((spec.n_channels, spec.n_samples))
            trials.append(
                Trial(data=mixing @ sources + noise, label=k, subject_id=spec.subject_id, fs=spec.fs)
            )
    return TrialSet(
        fs=spec.fs,
        n_classes=spec.n_classes,
        trials=trials,
        subject_id=spec.subject_id,
        n_channels=spec.n_channels,
        n_samples=spec.n_samples,
    )
