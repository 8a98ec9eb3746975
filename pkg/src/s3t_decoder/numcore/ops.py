"""Differentiable operations needed by the S3T network.

All operations accept leading batch dimensions and broadcast like numpy; gradients
flowing back to a broadcast operand are summed over the broadcast axes.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import erf

from s3t_decoder.errors import ConfigurationError, DimensionError, NumericError
from s3t_decoder.numcore.tensor import DiffTensor, constant, record

_SQRT_2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, dim in enumerate(shape) if dim == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def add(a, b) -> DiffTensor:
    a, b = constant(a), constant(b)
    values = a.values + b.values

    def _backward(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)

    return record(values, (a, b), _backward)


def sub(a, b) -> DiffTensor:
    a, b = constant(a), constant(b)
    values = a.values - b.values

    def _backward(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(-grad, b.shape)

    return record(values, (a, b), _backward)


def mul(a, b) -> DiffTensor:
    a, b = constant(a), constant(b)
    values = a.values * b.values

    def _backward(grad):
        return (
            _unbroadcast(grad * b.values, a.shape),
            _unbroadcast(grad * a.values, b.shape),
        )

    return record(values, (a, b), _backward)


def matmul(a: DiffTensor, b: DiffTensor) -> DiffTensor:
    """Matrix product over the last two axes.

    Raises:
        DimensionError: If the inner dimensions or batch dimensions disagree
    """
    a, b = constant(a), constant(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    try:
        values = np.matmul(a.values, b.values)
    except ValueError as exc:
        raise DimensionError(f"matmul shape mismatch: {a.shape} x {b.shape}") from exc

    def _backward(grad):
        grad_a = np.matmul(grad, np.swapaxes(b.values, -1, -2))
        grad_b = np.matmul(np.swapaxes(a.values, -1, -2), grad)
        return _unbroadcast(grad_a, a.shape), _unbroadcast(grad_b, b.shape)

    return record(values, (a, b), _backward)


def linear(x: DiffTensor, weight: DiffTensor, bias: DiffTensor | None = None) -> DiffTensor:
    """``x @ weight + bias`` over the last axis of ``x``; a 1-D ``x`` gives a 1-D result."""
    x = constant(x)
    if x.ndim == 1:
        row = matmul(reshape(x, (1, x.shape[0])), weight)
        out = reshape(row, (weight.shape[-1],))
    else:
        out = matmul(x, weight)
    return out if bias is None else add(out, bias)


def swapaxes(x: DiffTensor, axis1: int, axis2: int) -> DiffTensor:
    values = np.swapaxes(x.values, axis1, axis2)

    def _backward(grad):
        return (np.swapaxes(grad, axis1, axis2),)

    return record(values, (x,), _backward)


def reshape(x: DiffTensor, shape: tuple[int, ...]) -> DiffTensor:
    original = x.shape
    try:
        values = x.values.reshape(shape)
    except ValueError as exc:
        raise DimensionError(f"Cannot reshape {original} to {shape}") from exc

    def _backward(grad):
        return (grad.reshape(original),)

    return record(values, (x,), _backward)


def mean(x: DiffTensor, axis: int, keepdims: bool = False) -> DiffTensor:
    values = x.values.mean(axis=axis, keepdims=keepdims)
    count = x.shape[axis]

    def _backward(grad):
        if not keepdims:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad / count, x.shape).copy(),)

    return record(values, (x,), _backward)


def sum_all(x: DiffTensor) -> DiffTensor:
    values = np.asarray(x.values.sum())

    def _backward(grad):
        return (np.full(x.shape, float(grad)),)

    return record(values, (x,), _backward)


def softmax_rows(x: DiffTensor) -> DiffTensor:
    """Softmax over the last axis with row-max subtraction.

    Raises:
        NumericError: If the input contains NaN
    """
    if np.isnan(x.values).any():
        raise NumericError("softmax_rows received NaN input")
    shifted = x.values - x.values.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    values = exp / exp.sum(axis=-1, keepdims=True)

    def _backward(grad):
        inner = (grad * values).sum(axis=-1, keepdims=True)
        return (values * (grad - inner),)

    return record(values, (x,), _backward)


def layer_norm(
    x: DiffTensor, gain: DiffTensor, bias: DiffTensor, eps: float = 1e-5
) -> DiffTensor:
    """Normalize each vector along the last axis, then apply ``gain * x + bias``.

    Raises:
        ConfigurationError: If the normalized dimension is smaller than 2
        DimensionError: If gain or bias do not match the normalized dimension
    """
    width = x.shape[-1]
    if width < 2:
        raise ConfigurationError(f"layer_norm needs at least 2 features, got {width}")
    if gain.shape != (width,) or bias.shape != (width,):
        raise DimensionError(
            f"layer_norm affine shapes {gain.shape}, {bias.shape} do not match width {width}"
        )
    centered = x.values - x.values.mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt((centered**2).mean(axis=-1, keepdims=True) + eps)
    normed = centered * inv_std
    values = normed * gain.values + bias.values

    def _backward(grad):
        lead = tuple(range(grad.ndim - 1))
        grad_normed = grad * gain.values
        grad_x = inv_std * (
            grad_normed
            - grad_normed.mean(axis=-1, keepdims=True)
            - normed * (grad_normed * normed).mean(axis=-1, keepdims=True)
        )
        return grad_x, (grad * normed).sum(axis=lead), grad.sum(axis=lead)

    return record(values, (x, gain, bias), _backward)


def gelu(x: DiffTensor) -> DiffTensor:
    """Exact GeLU, ``x * Phi(x)`` with the standard normal CDF."""
    cdf = 0.5 * (1.0 + erf(x.values / _SQRT_2))
    values = x.values * cdf

    def _backward(grad):
        pdf = _INV_SQRT_2PI * np.exp(-0.5 * x.values**2)
        return (grad * (cdf + x.values * pdf),)

    return record(values, (x,), _backward)


def conv1d_time(x: DiffTensor, kernel: DiffTensor, bias: DiffTensor) -> DiffTensor:
    """Depthwise 1-D convolution along the last (time) axis.

    Each channel has its own kernel; the input is zero-padded by ``(k_c - 1) / 2`` on
    both sides so the output keeps length T.

    Args:
        x: Input of shape ``(..., C, T)``
        kernel: Per-channel kernels of shape ``(C, k_c)``
        bias: Per-channel offsets of shape ``(C,)``

    Raises:
        ConfigurationError: If ``k_c`` is even or longer than T
        DimensionError: If kernel or bias do not match the channel count
    """
    n_channels, n_samples = x.shape[-2], x.shape[-1]
    width = kernel.shape[-1]
    if width % 2 == 0:
        raise ConfigurationError(f"Convolution kernel size must be odd, got {width}")
    if width > n_samples:
        raise ConfigurationError(f"Kernel size {width} exceeds signal length {n_samples}")
    if kernel.shape[0] != n_channels or bias.shape != (n_channels,):
        raise DimensionError(
            f"Kernel {kernel.shape} / bias {bias.shape} do not match {n_channels} channels"
        )
    pad = (width - 1) // 2
    pad_spec = [(0, 0)] * (x.ndim - 1) + [(pad, pad)]
    windows = sliding_window_view(np.pad(x.values, pad_spec), width, axis=-1)
    values = np.einsum("...ctk,ck->...ct", windows, kernel.values) + bias.values[:, None]

    def _backward(grad):
        lead = tuple(range(grad.ndim - 2))
        grad_windows = sliding_window_view(np.pad(grad, pad_spec), width, axis=-1)
        grad_x = np.einsum("...ctk,ck->...ct", grad_windows, kernel.values[:, ::-1])
        grad_kernel = np.einsum(
            "nctk,nct->ck",
            windows.reshape((-1,) + windows.shape[-3:]),
            grad.reshape((-1,) + grad.shape[-2:]),
        )
        grad_bias = grad.sum(axis=lead).sum(axis=-1)
        return grad_x, grad_kernel, grad_bias

    return record(values, (x, kernel, bias), _backward)


def dropout(
    x: DiffTensor, rate: float, training: bool, rng: np.random.Generator | None
) -> DiffTensor:
    """Inverted dropout: survivors are scaled by ``1 / (1 - rate)``; eval mode is identity.

    Raises:
        ConfigurationError: If ``rate`` is outside ``[0, 1)``
    """
    if not 0 <= rate < 1:
        raise ConfigurationError(f"Dropout rate must lie in [0, 1), got {rate}")
    if not training or rate == 0:
        return x
    if rng is None:
        raise ConfigurationError("Training-mode dropout needs a seeded generator")
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    values = x.values * mask

    def _backward(grad):
        return (grad * mask,)

    return record(values, (x,), _backward)


def log(x: DiffTensor, floor: float = 0.0) -> DiffTensor:
    """Natural log with inputs clamped below at ``floor``; clamped entries get no gradient."""
    clamped = np.maximum(x.values, floor)
    values = np.log(clamped)

    def _backward(grad):
        return (np.where(x.values > floor, grad / clamped, 0.0),)

    return record(values, (x,), _backward)


def take_labels(x: DiffTensor, labels: np.ndarray) -> DiffTensor:
    """Select ``x[m, labels[m]]`` for each row ``m`` of a 2-D tensor."""
    labels = np.asarray(labels, dtype=np.int64)
    rows = np.arange(x.shape[0])
    values = x.values[rows, labels]

    def _backward(grad):
        full = np.zeros(x.shape)
        np.add.at(full, (rows, labels), grad)
        return (full,)

    return record(values, (x,), _backward)
