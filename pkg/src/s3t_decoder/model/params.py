"""Trainable tensors of the S3T network and their initialization."""

from collections.abc import Iterator, Mapping

import numpy as np

from s3t_decoder.config.config_loader import ModelConfig
from s3t_decoder.numcore import DiffTensor, parameter


class ModelParams(Mapping[str, DiffTensor]):
    """Named trainable tensors, iterated in creation order."""

    def __init__(self, tensors: Mapping[str, DiffTensor] | None = None):
        self._tensors: dict[str, DiffTensor] = dict(tensors or {})

    def __getitem__(self, name: str) -> DiffTensor:
        return self._tensors[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def __repr__(self):
        return f"ModelParams({len(self)} tensors, {count_params(self)} scalars)"

    def zero_grad(self) -> None:
        for tensor in self._tensors.values():
            tensor.zero_grad()

    def arrays(self) -> dict[str, np.ndarray]:
        """Copies of the current values keyed by name."""
        return {name: tensor.values.copy() for name, tensor in self._tensors.items()}

    def copy(self) -> "ModelParams":
        return ModelParams.from_arrays(self.arrays())

    @classmethod
    def from_arrays(cls, arrays: Mapping[str, np.ndarray]) -> "ModelParams":
        return cls({name: parameter(values, name=name) for name, values in arrays.items()})


def count_params(params: Mapping[str, DiffTensor]) -> int:
    """Total number of trainable scalars."""
    return int(sum(tensor.size for tensor in params.values()))


def parameter_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Every parameter name and shape implied by ``config``, in creation order."""
    channels, d = config.n_feature_channels, config.slice_d
    shapes: dict[str, tuple[int, ...]] = {}

    if config.use_spatial:
        # Not in the published wiring; see _spatial_norm in model.s3t.
        shapes["spatial.norm.gain"] = (config.n_samples,)
        shapes["spatial.norm.bias"] = (config.n_samples,)
        for part in ("query", "key", "value"):
            shapes[f"spatial.{part}.weight"] = (channels, channels)
            shapes[f"spatial.{part}.bias"] = (channels,)

    if config.use_posenc:
        shapes["posenc.kernel"] = (channels, config.k_c)
        shapes["posenc.bias"] = (channels,)

    if config.use_temporal:
        inner = config.n_f * d
        for block in range(config.n_a):
            prefix = f"block{block}"
            shapes[f"{prefix}.norm1.gain"] = (d,)
            shapes[f"{prefix}.norm1.bias"] = (d,)
            shapes[f"{prefix}.query.weight"] = (d, config.d_k)
            shapes[f"{prefix}.query.bias"] = (config.d_k,)
            shapes[f"{prefix}.key.weight"] = (d, config.d_k)
            shapes[f"{prefix}.key.bias"] = (config.d_k,)
            shapes[f"{prefix}.value.weight"] = (d, config.d_v)
            shapes[f"{prefix}.value.bias"] = (config.d_v,)
            shapes[f"{prefix}.output.weight"] = (config.d_v, d)
            shapes[f"{prefix}.output.bias"] = (d,)
            if config.use_ff:
                shapes[f"{prefix}.norm2.gain"] = (d,)
                shapes[f"{prefix}.norm2.bias"] = (d,)
                shapes[f"{prefix}.ff1.weight"] = (d, inner)
                shapes[f"{prefix}.ff1.bias"] = (inner,)
                shapes[f"{prefix}.ff2.weight"] = (inner, d)
                shapes[f"{prefix}.ff2.bias"] = (d,)

    shapes["head.norm.gain"] = (d,)
    shapes["head.norm.bias"] = (d,)
    shapes["head.fc.weight"] = (d, config.n_classes)
    shapes["head.fc.bias"] = (config.n_classes,)
    return shapes


def _initial_values(name: str, shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    if name.endswith(".gain"):
        return np.ones(shape)
    if name.endswith(".bias"):
        return np.zeros(shape)
    if name == "posenc.kernel":
        limit = 1.0 / np.sqrt(shape[1])
    else:
        limit = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-limit, limit, size=shape)


def init_params(config: ModelConfig, rng: np.random.Generator) -> ModelParams:
    """Xavier-uniform weights, zero biases, unit layer-norm gains.

    The position-encoding kernel draws from ``U(-1/sqrt(k_c), 1/sqrt(k_c))``.
    """
    config.validate()
    return ModelParams(
        {
            name: parameter(_initial_values(name, shape, rng), name=name)
            for name, shape in parameter_shapes(config).items()
        }
    )


def expected_param_count(config: ModelConfig) -> int:
    """Parameter count computed from the configuration alone."""
    return int(sum(np.prod(shape) for shape in parameter_shapes(config).values()))
