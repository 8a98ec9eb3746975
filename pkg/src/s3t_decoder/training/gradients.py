"""Finite-difference verification of the network's analytic gradients."""

import numpy as np

from s3t_decoder.config.config_loader import ModelConfig
from s3t_decoder.model import forward, init_params
from s3t_decoder.numcore.gradcheck import check_gradients
from s3t_decoder.training.loss import cross_entropy

GRADIENT_TOLERANCE = 1e-4


def tiny_config(**overrides) -> ModelConfig:
    """A network small enough to finite-difference every parameter; dropout is off."""
    settings = dict(
        n_feature_channels=4,
        n_samples=40,
        n_classes=3,
        slice_d=4,
        n_heads=2,
        k_c=5,
        n_f=2,
        n_a=2,
        dropout_spatial=0.0,
        dropout_temporal=0.0,
    )
    settings.update(overrides)
    return ModelConfig(**settings)


def check_model_gradients(
    config: ModelConfig | None = None,
    *,
    n_trials: int = 6,
    n_coordinates: int = 10,
    seed: int = 0,
) -> dict[str, float]:
    """Worst relative error between backward() and central differences per parameter."""
    config = config or tiny_config()
    rng = np.random.default_rng(seed)
    params = init_params(config, rng)
    # Non-trivial affine parameters so their gradients are exercised away from the init.
    for name, tensor in params.items():
        if name.endswith((".gain", ".bias")):
            tensor.values += 0.1 * rng.standard_normal(tensor.shape)
    data = rng.standard_normal((n_trials, config.n_feature_channels, config.n_samples))
    labels = rng.integers(0, config.n_classes, size=n_trials)

    def loss_fn():
        return cross_entropy(forward(data, params, config), labels)

    return check_gradients(loss_fn, params, n_coordinates=n_coordinates, seed=seed)
