"""Dense differentiable arrays, the S3T operation set and the Adam optimizer."""

from s3t_decoder.numcore.ops import (
    add,
    conv1d_time,
    dropout,
    gelu,
    layer_norm,
    linear,
    log,
    matmul,
    mean,
    mul,
    reshape,
    softmax_rows,
    sub,
    sum_all,
    swapaxes,
    take_labels,
)
from s3t_decoder.numcore.optim import AdamState, adam_step
from s3t_decoder.numcore.tensor import (
    DiffTensor,
    backward,
    constant,
    is_grad_enabled,
    no_grad,
    parameter,
)
