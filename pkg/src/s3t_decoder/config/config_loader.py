"""Module for loading and validating pipeline configuration files."""

import json
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any

from s3t_decoder.config import constants
from s3t_decoder.errors import ConfigurationError


@dataclass
class PreprocessConfig:
    """Band-pass, epoching and channel selection settings."""

    low: float = constants.BAND_LOW_HZ
    high: float = constants.BAND_HIGH_HZ
    order: int = constants.FILTER_ORDER
    window: tuple[float, float] = constants.WINDOW_2A
    drop_channels: list[int] = field(default_factory=list)

    def validate(self) -> None:
        if not 0 < self.low < self.high:
            raise ConfigurationError(
                f"Invalid band {self.low}:{self.high}; need 0 < low < high"
            )
        if self.order < 1:
            raise ConfigurationError(f"Filter order must be positive, got {self.order}")
        if self.window[1] <= self.window[0]:
            raise ConfigurationError(f"Empty window {self.window[0]}:{self.window[1]}")


@dataclass
class ModelConfig:
    """Shape and regularization settings of the S3T network.

    ``d_k`` and ``d_v`` default to ``slice_d``; the spatial projections are always
    square over the feature channels.
    """

    n_feature_channels: int
    n_samples: int
    n_classes: int
    slice_d: int = constants.SLICE_WIDTH
    n_heads: int = constants.N_HEADS
    k_c: int = constants.POS_KERNEL
    n_f: int = constants.FF_EXPANSION
    n_a: int = constants.N_BLOCKS
    d_k: int | None = None
    d_v: int | None = None
    dropout_spatial: float = constants.DROPOUT_SPATIAL
    dropout_temporal: float = constants.DROPOUT_TEMPORAL
    layer_norm_eps: float = constants.LAYER_NORM_EPS
    use_spatial: bool = True
    use_temporal: bool = True
    use_posenc: bool = True
    use_ff: bool = True

    def __post_init__(self):
        if self.d_k is None:
            self.d_k = self.slice_d
        if self.d_v is None:
            self.d_v = self.slice_d

    @property
    def n_slices(self) -> int:
        return self.n_samples // self.slice_d

    def validate(self) -> None:
        """Check the structural invariants.

        Raises:
            ConfigurationError: naming the first violated constraint
        """
        if self.n_feature_channels < 1:
            raise ConfigurationError("n_feature_channels must be at least 1")
        if self.use_spatial and self.n_feature_channels < 2:
            raise ConfigurationError(
                f"Spatial attention needs at least 2 feature channels, got {self.n_feature_channels}"
            )
        if self.n_classes < 2:
            raise ConfigurationError(f"n_classes must be at least 2, got {self.n_classes}")
        if self.slice_d < 2:
            raise ConfigurationError(f"slice_d must be at least 2, got {self.slice_d}")
        if self.n_samples % self.slice_d != 0:
            raise ConfigurationError(
                f"T={self.n_samples} is not divisible by slice_d={self.slice_d}; "
                "adjust the epoching window or the slice width"
            )
        if self.d_k % self.n_heads != 0 or self.d_v % self.n_heads != 0:
            raise ConfigurationError(
                f"d_k={self.d_k} and d_v={self.d_v} must be divisible by h={self.n_heads}"
            )
        if self.use_posenc:
            if self.k_c % 2 == 0:
                raise ConfigurationError(f"k_c must be odd, got {self.k_c}")
            if self.k_c > self.n_samples:
                raise ConfigurationError(f"k_c={self.k_c} exceeds T={self.n_samples}")
        for name in ("dropout_spatial", "dropout_temporal"):
            rate = getattr(self, name)
            if not 0 <= rate < 1:
                raise ConfigurationError(f"{name} must lie in [0, 1), got {rate}")
        if self.n_a < 0 or self.n_f < 1:
            raise ConfigurationError("n_a must be >= 0 and n_f >= 1")

    def without(self, component: str) -> "ModelConfig":
        """Return a copy with one component ablated."""
        flag = f"use_{component}"
        if not hasattr(self, flag):
            raise ConfigurationError(
                f"Unknown ablation '{component}'. Available options: {', '.join(constants.ABLATIONS)}"
            )
        return replace(self, **{flag: False})


@dataclass
class TrainConfig:
    """Optimizer, batching and cross-validation settings."""

    learning_rate: float = constants.LEARNING_RATE
    beta1: float = constants.BETA1
    beta2: float = constants.BETA2
    epsilon: float = constants.ADAM_EPS
    batch_size: int = constants.BATCH_SIZE
    epochs: int = constants.EPOCHS
    seed: int = constants.SEED
    folds: int = constants.FOLDS
    log_every: int = constants.LOG_EVERY
    workers: int | None = None

    def validate(self) -> None:
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.folds < 2:
            raise ConfigurationError(f"folds must be >= 2, got {self.folds}")
        if self.epochs < 0:
            raise ConfigurationError(f"epochs must be >= 0, got {self.epochs}")
        if self.learning_rate < 0:
            raise ConfigurationError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigurationError(f"Adam betas must lie in [0, 1), got {self.beta1}, {self.beta2}")


@dataclass
class PipelineConfig:
    """Everything a cross-validated run needs besides the data."""

    n_classes: int
    n_rows: int
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    model: dict[str, Any] = field(default_factory=dict)
    train: TrainConfig = field(default_factory=TrainConfig)

    @property
    def n_feature_channels(self) -> int:
        """Rows of the OVR-CSP filter; binary tasks use a single sub-filter."""
        n_subfilters = 1 if self.n_classes == 2 else self.n_classes
        return n_subfilters * self.n_rows

    def model_config(self, n_samples: int) -> ModelConfig:
        """Build the network configuration for trials of ``n_samples`` samples."""
        config = ModelConfig(
            n_feature_channels=self.n_feature_channels,
            n_samples=n_samples,
            n_classes=self.n_classes,
            **self.model,
        )
        config.validate()
        return config

    def validate(self) -> None:
        if self.n_classes < 2:
            raise ConfigurationError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.n_rows < 1:
            raise ConfigurationError(f"n_rows must be >= 1, got {self.n_rows}")
        unknown = set(self.model) - {f.name for f in fields(ModelConfig)}
        if unknown:
            raise ConfigurationError(f"Unknown model settings: {', '.join(sorted(unknown))}")
        self.preprocess.validate()
        self.train.validate()


def preset(name: str) -> PipelineConfig:
    """Return the configuration used for one of the BCI Competition IV datasets.

    Raises:
        ConfigurationError: If the preset name is unknown
    """
    if name == "bci-iv-2a":
        return PipelineConfig(
            n_classes=4,
            n_rows=constants.ROWS_2A,
            preprocess=PreprocessConfig(window=constants.WINDOW_2A),
        )
    if name == "bci-iv-2b":
        return PipelineConfig(
            n_classes=2,
            n_rows=constants.ROWS_2B,
            preprocess=PreprocessConfig(window=constants.WINDOW_2B),
        )
    raise ConfigurationError(
        f"Unknown preset '{name}'. Available options: {', '.join(constants.PRESETS)}"
    )


def _parse_window(value) -> tuple[float, float]:
    if isinstance(value, str):
        start, end = value.split(":")
        return float(start), float(end)
    start, end = value
    return float(start), float(end)


def load_config(config_path: str, base: PipelineConfig | None = None) -> PipelineConfig:
    """Load and validate a pipeline config file.

    Args:
        config_path: Path to the config JSON file
        base: Configuration whose values are kept for keys the file omits

    Returns:
        PipelineConfig with validated configuration

    Raises:
        ConfigurationError: If a value is invalid or the class count is missing
        JSONDecodeError: If JSON is invalid
        FileNotFoundError: If config file doesn't exist
    """
    with open(config_path, encoding="utf-8") as json_file:
        data = json.load(json_file)

    if base is None:
        if "n_classes" not in data or "n_rows" not in data:
            raise ConfigurationError("Config must define n_classes and n_rows")
        base = PipelineConfig(n_classes=data["n_classes"], n_rows=data["n_rows"])

    preprocess_data = dict(data.get("preprocess", {}))
    if "window" in preprocess_data:
        preprocess_data["window"] = _parse_window(preprocess_data["window"])
    train_data = data.get("train", {})

    try:
        config = PipelineConfig(
            n_classes=data.get("n_classes", base.n_classes),
            n_rows=data.get("n_rows", base.n_rows),
            preprocess=replace(base.preprocess, **preprocess_data),
            model={**base.model, **data.get("model", {})},
            train=replace(base.train, **train_data),
        )
    except TypeError as exc:
        raise ConfigurationError(f"Invalid config file {config_path}: {exc}") from exc
    config.validate()
    return config


def config_to_dict(config: PipelineConfig) -> dict[str, Any]:
    """Plain-dict view of a pipeline config, suitable for JSON."""
    return asdict(config)
