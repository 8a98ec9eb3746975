"""Forward pass of the S3T network.

Wiring (each stage optional through the ablation flags of ModelConfig)::

    Z (C_f x T)
      -> spatial feature-channel attention, residual
      -> depthwise temporal convolution (position encoding), residual
      -> mean over feature channels (1 x T)
      -> slices (T/d x d)
      -> N_a pre-norm blocks: MHA + residual, FF + residual
      -> mean over slices, layer norm, fully connected, softmax

Every function accepts optional leading batch dimensions.
"""

from dataclasses import dataclass

import numpy as np

from s3t_decoder.config.config_loader import ModelConfig
from s3t_decoder.errors import ConfigurationError, DimensionError
from s3t_decoder.numcore import (
    DiffTensor,
    add,
    constant,
    conv1d_time,
    dropout,
    gelu,
    layer_norm,
    linear,
    matmul,
    mean,
    mul,
    no_grad,
    reshape,
    softmax_rows,
    swapaxes,
)
from s3t_decoder.model.params import ModelParams


@dataclass(frozen=True)
class SliceSequence:
    """A compressed 1 x T signal cut into contiguous slices of width d."""

    slices: np.ndarray
    provenance: str = ""

    @classmethod
    def from_signal(cls, signal: np.ndarray, d: int, provenance: str = "") -> "SliceSequence":
        return cls(slices=slice_time(constant(np.ravel(signal)), d).values, provenance=provenance)

    @property
    def n_slices(self) -> int:
        return self.slices.shape[0]

    def unslice(self) -> np.ndarray:
        return self.slices.reshape(-1)


def _project_channels(
    x: DiffTensor, params: ModelParams, name: str
) -> DiffTensor:
    """Linear map along the feature-channel axis: ``W x + b`` with x of shape (..., C, T)."""
    weight = params[f"{name}.weight"]
    bias = reshape(params[f"{name}.bias"], (weight.shape[0], 1))
    return add(matmul(weight, x), bias)


def _spatial_norm(Z: DiffTensor, params: ModelParams, config: ModelConfig) -> DiffTensor:
    """Layer norm of each feature channel over time ahead of the channel attention.

    The published network description places no normalization here; this layer is a
    choice of this implementation. Its gain and bias have length T, so it accounts
    for 2T trainable scalars (2,000 for 1000-sample trials).
    """
    return layer_norm(
        Z, params["spatial.norm.gain"], params["spatial.norm.bias"], config.layer_norm_eps
    )


def _channel_scores(normed: DiffTensor, params: ModelParams, config: ModelConfig) -> DiffTensor:
    query = _project_channels(normed, params, "spatial.query")
    key = _project_channels(normed, params, "spatial.key")
    logits = mul(matmul(query, swapaxes(key, -1, -2)), 1.0 / np.sqrt(config.n_feature_channels))
    return softmax_rows(logits)


def spatial_scores(Z, params: ModelParams, config: ModelConfig) -> DiffTensor:
    """Row-stochastic C_f x C_f attention between feature channels."""
    return _channel_scores(_spatial_norm(constant(Z), params, config), params, config)


def spatial_attention(
    Z,
    params: ModelParams,
    config: ModelConfig,
    *,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> DiffTensor:
    """Feature-channel attention with a residual connection.

    Each channel's time course is a token. Q, K and V are linear maps along the
    channel axis of the layer-normalized input; the scores weight V and the result
    is added back onto Z.

    Raises:
        ConfigurationError: If there are fewer than 2 feature channels
    """
    Z = constant(Z)
    if Z.shape[-2] < 2:
        raise ConfigurationError(f"Spatial attention needs C_f >= 2, got {Z.shape[-2]}")
    normed = _spatial_norm(Z, params, config)
    scores = _channel_scores(normed, params, config)
    value = _project_channels(normed, params, "spatial.value")
    attended = dropout(matmul(scores, value), config.dropout_spatial, training, rng)
    return add(Z, attended)


def position_encode(x, params: ModelParams) -> DiffTensor:
    """Depthwise temporal convolution added onto its input."""
    x = constant(x)
    return add(x, conv1d_time(x, params["posenc.kernel"], params["posenc.bias"]))


def compress_channels(x) -> DiffTensor:
    """Mean over the feature-channel axis: (..., C_f, T) -> (..., T)."""
    return mean(constant(x), axis=-2)


def slice_time(x, d: int) -> DiffTensor:
    """Cut (..., T) into contiguous (..., T/d, d) slices.

    Raises:
        ConfigurationError: If T is not divisible by d
    """
    x = constant(x)
    n_samples = x.shape[-1]
    if d < 1 or n_samples % d != 0:
        raise ConfigurationError(
            f"T={n_samples} is not divisible by slice width {d}; "
            "adjust the epoching window or the slice width"
        )
    return reshape(x, x.shape[:-1] + (n_samples // d, d))


def _split_heads(x: DiffTensor, n_heads: int) -> DiffTensor:
    """(..., n, h * w) -> (..., h, n, w)"""
    width = x.shape[-1] // n_heads
    return swapaxes(reshape(x, x.shape[:-1] + (n_heads, width)), -2, -3)


def _merge_heads(x: DiffTensor) -> DiffTensor:
    """(..., h, n, w) -> (..., n, h * w)"""
    merged = swapaxes(x, -2, -3)
    return reshape(merged, merged.shape[:-2] + (merged.shape[-2] * merged.shape[-1],))


def head_scores(X, params: ModelParams, block: int, config: ModelConfig) -> DiffTensor:
    """Per-head attention matrices (..., h, n, n) of one block's MHA on input X."""
    X = constant(X)
    prefix = f"block{block}"
    query = linear(X, params[f"{prefix}.query.weight"], params[f"{prefix}.query.bias"])
    key = linear(X, params[f"{prefix}.key.weight"], params[f"{prefix}.key.bias"])
    query, key = _split_heads(query, config.n_heads), _split_heads(key, config.n_heads)
    scale = 1.0 / np.sqrt(config.d_k // config.n_heads)
    return softmax_rows(mul(matmul(query, swapaxes(key, -1, -2)), scale))


def multi_head_attention(
    X,
    params: ModelParams,
    block: int,
    config: ModelConfig,
    *,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> DiffTensor:
    """Self-attention over slices with h heads, concatenated and projected by W^o.

    Raises:
        ConfigurationError: If d_k or d_v is not divisible by h
    """
    if config.d_k % config.n_heads or config.d_v % config.n_heads:
        raise ConfigurationError(
            f"d_k={config.d_k} and d_v={config.d_v} must be divisible by h={config.n_heads}"
        )
    X = constant(X)
    prefix = f"block{block}"
    scores = head_scores(X, params, block, config)
    value = _split_heads(
        linear(X, params[f"{prefix}.value.weight"], params[f"{prefix}.value.bias"]), config.n_heads
    )
    heads = _merge_heads(matmul(scores, value))
    out = linear(heads, params[f"{prefix}.output.weight"], params[f"{prefix}.output.bias"])
    return dropout(out, config.dropout_temporal, training, rng)


def feed_forward(
    X: DiffTensor,
    params: ModelParams,
    block: int,
    config: ModelConfig,
    *,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> DiffTensor:
    prefix = f"block{block}"
    inner = gelu(linear(X, params[f"{prefix}.ff1.weight"], params[f"{prefix}.ff1.bias"]))
    inner = dropout(inner, config.dropout_temporal, training, rng)
    return linear(inner, params[f"{prefix}.ff2.weight"], params[f"{prefix}.ff2.bias"])


def temporal_block(
    X,
    params: ModelParams,
    block: int,
    config: ModelConfig,
    *,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> DiffTensor:
    """Pre-norm transformer block: ``X1 = X + MHA(LN(X))``, ``X2 = X1 + FF(LN(X1))``."""
    X = constant(X)
    prefix = f"block{block}"
    eps = config.layer_norm_eps
    normed = layer_norm(X, params[f"{prefix}.norm1.gain"], params[f"{prefix}.norm1.bias"], eps)
    X = add(X, multi_head_attention(normed, params, block, config, training=training, rng=rng))
    if not config.use_ff:
        return X
    normed = layer_norm(X, params[f"{prefix}.norm2.gain"], params[f"{prefix}.norm2.bias"], eps)
    return add(X, feed_forward(normed, params, block, config, training=training, rng=rng))


def classify(X, params: ModelParams, config: ModelConfig) -> tuple[DiffTensor, DiffTensor]:
    """Global average pooling over slices, layer norm, FC, softmax.

    Returns:
        ``(logits, probabilities)`` each of shape (..., N)
    """
    pooled = mean(constant(X), axis=-2)
    normed = layer_norm(pooled, params["head.norm.gain"], params["head.norm.bias"], config.layer_norm_eps)
    logits = linear(normed, params["head.fc.weight"], params["head.fc.bias"])
    return logits, softmax_rows(logits)


def forward(
    Z,
    params: ModelParams,
    config: ModelConfig,
    *,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> DiffTensor:
    """Class probabilities for a trial (C_f, T) or a batch (B, C_f, T).

    Raises:
        DimensionError: If the input shape disagrees with ``config``
    """
    Z = constant(Z)
    expected = (config.n_feature_channels, config.n_samples)
    if Z.ndim < 2 or Z.shape[-2:] != expected:
        raise DimensionError(f"Model expects trials of shape {expected}, got {Z.shape}")

    x = Z
    if config.use_spatial:
        x = spatial_attention(x, params, config, training=training, rng=rng)
    if config.use_posenc:
        x = position_encode(x, params)
    X = slice_time(compress_channels(x), config.slice_d)
    if config.use_temporal:
        for block in range(config.n_a):
            X = temporal_block(X, params, block, config, training=training, rng=rng)
    _, probabilities = classify(X, params, config)
    return probabilities


def predict(Z, params: ModelParams, config: ModelConfig) -> np.ndarray:
    """Eval-mode probabilities as a plain array."""
    with no_grad():
        return forward(Z, params, config, training=False).values
