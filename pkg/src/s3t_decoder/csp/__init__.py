"""One-versus-rest common spatial pattern filtering."""

from s3t_decoder.csp.spatial_filter import (
    OvrSubfilter,
    SpatialFilter,
    apply_filter,
    build_subfilter,
    class_mean_cov,
    fit_ovr_filter,
    trial_covariance,
    whitening_matrix,
)
