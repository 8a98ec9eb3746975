"""Test helper functions for s3t-decoder tests.

Small seeded inputs shared across the suites: SPD matrices, synthetic trial sets,
and pipeline configurations that train in seconds.
"""

import numpy as np

from s3t_decoder.config import ModelConfig, PipelineConfig, TrainConfig
from s3t_decoder.dataio import SynthSpec, generate_synthetic
from s3t_decoder.preprocess import TrialSet


def random_spd(rng: np.random.Generator, n: int, jitter: float = 0.1) -> np.ndarray:
    """A well-conditioned symmetric positive definite matrix."""
    factor = rng.standard_normal((n, 2 * n))
    return factor @ factor.T / (2 * n) + jitter * np.eye(n)


def small_trial_set(
    n_classes: int = 2,
    trials_per_class: int = 10,
    n_channels: int = 4,
    n_samples: int = 40,
    seed: int = 0,
    **overrides,
) -> TrialSet:
    """Synthetic trials at 100 Hz with one boosted source per class."""
    spec = SynthSpec(
        n_classes=n_classes,
        trials_per_class=trials_per_class,
        n_channels=n_channels,
        n_samples=n_samples,
        fs=100.0,
        seed=seed,
        **overrides,
    )
    return generate_synthetic(spec)


def small_model_overrides(**overrides) -> dict:
    """Model settings for T=40 trials that keep every component active."""
    settings = {
        "slice_d": 4,
        "n_heads": 2,
        "k_c": 5,
        "n_f": 2,
        "n_a": 1,
        "dropout_spatial": 0.0,
        "dropout_temporal": 0.0,
    }
    settings.update(overrides)
    return settings


def small_pipeline_config(
    n_classes: int = 2, n_rows: int = 2, epochs: int = 2, folds: int = 2, seed: int = 0, **train
) -> PipelineConfig:
    return PipelineConfig(
        n_classes=n_classes,
        n_rows=n_rows,
        model=small_model_overrides(),
        train=TrainConfig(
            epochs=epochs, folds=folds, seed=seed, batch_size=10, log_every=0, workers=2, **train
        ),
    )


def small_model_config(**overrides) -> ModelConfig:
    settings = dict(n_feature_channels=4, n_samples=40, n_classes=3)
    settings.update(small_model_overrides())
    settings.update(overrides)
    return ModelConfig(**settings)
