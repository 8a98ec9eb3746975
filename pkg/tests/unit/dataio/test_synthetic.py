"""Unit tests for the synthetic trial generator."""

import numpy as np
import pytest

from s3t_decoder.csp import class_mean_cov
from s3t_decoder.dataio import SynthSpec, encode_trial_set, generate_synthetic
from s3t_decoder.dataio.synthetic import mixing_matrix
from s3t_decoder.errors import ConfigurationError


def test_class_covariances_follow_source_variances():
    spec = SynthSpec(
        n_classes=2,
        trials_per_class=40,
        n_channels=2,
        n_samples=400,
        amplitude=2.0,
        noise_sigma=0.0,
    )
    trials = list(generate_synthetic(spec))
    for k, expected in ((0, [4.0, 1.0]), (1, [1.0, 4.0])):
        covariance = class_mean_cov(trials, lambda label, k=k: label == k)
        np.testing.assert_allclose(np.diag(covariance), expected, rtol=0.01)
        assert abs(covariance[0, 1]) < 0.15


def test_same_seed_gives_identical_bytes():
    spec = SynthSpec(n_classes=3, trials_per_class=4, n_channels=5, n_samples=50, mixing_seed=11)
    assert encode_trial_set(generate_synthetic(spec)) == encode_trial_set(generate_synthetic(spec))
    other = SynthSpec(n_classes=3, trials_per_class=4, n_channels=5, n_samples=50, seed=1)
    assert encode_trial_set(generate_synthetic(spec)) != encode_trial_set(generate_synthetic(other))


def test_class_major_order_and_shapes():
    trial_set = generate_synthetic(SynthSpec(n_classes=3, trials_per_class=2, n_samples=60))
    assert trial_set.labels.tolist() == [0, 0, 1, 1, 2, 2]
    assert trial_set.data.shape == (6, 8, 60)
    assert trial_set.fs == 100.0


def test_zero_trials_gives_empty_set():
    trial_set = generate_synthetic(SynthSpec(trials_per_class=0))
    assert len(trial_set) == 0
    assert trial_set.n_channels == 8
    assert trial_set.n_samples == 200


def test_mixing_is_identity_without_seed():
    spec = SynthSpec(n_channels=4)
    np.testing.assert_array_equal(mixing_matrix(spec, 2), np.eye(4))
    mixed = SynthSpec(n_channels=4, mixing_seed=5)
    assert not np.allclose(mixing_matrix(mixed, 0), mixing_matrix(mixed, 1))
    np.testing.assert_array_equal(mixing_matrix(mixed, 1), mixing_matrix(mixed, 1))


@pytest.mark.parametrize("frequencies", [[2.0, 10.0], [10.0, 45.0]])
def test_frequency_outside_band(frequencies):
    with pytest.raises(ConfigurationError, match="Invalid frequency"):
        generate_synthetic(SynthSpec(n_classes=2, frequencies=frequencies))


def test_nyquist_violation():
    with pytest.raises(ConfigurationError, match="Nyquist"):
        generate_synthetic(SynthSpec(n_classes=2, frequencies=[10.0, 30.0], fs=60.0))


def test_source_variance_shape_checked():
    with pytest.raises(ConfigurationError, match="source_variances"):
        generate_synthetic(SynthSpec(n_classes=2, n_channels=3, source_variances=[[1.0, 2.0]]))
