"""The S3T network: parameters, forward pass and parameter counting."""

from s3t_decoder.model.params import (
    ModelParams,
    count_params,
    expected_param_count,
    init_params,
    parameter_shapes,
)
from s3t_decoder.model.s3t import (
    SliceSequence,
    classify,
    compress_channels,
    forward,
    head_scores,
    multi_head_attention,
    position_encode,
    predict,
    slice_time,
    spatial_attention,
    spatial_scores,
    temporal_block,
)
