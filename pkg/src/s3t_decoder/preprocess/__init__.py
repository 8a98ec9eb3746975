"""Segmentation, band-pass filtering and standardization of EEG trials."""

from s3t_decoder.preprocess.signal import (
    bandpass,
    design_bandpass,
    drop_channels,
    segment,
    window_length,
)
from s3t_decoder.preprocess.standardize import (
    StandardizationStats,
    destandardize,
    fit_standardization,
    standardize,
)
from s3t_decoder.preprocess.trials import Recording, Trial, TrialSet
