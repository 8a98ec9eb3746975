"""Unit tests for ablation and sweep settings."""

import pytest

from s3t_decoder.errors import ConfigurationError
from s3t_decoder.training import ablation_settings, run_settings, sweep_settings
from tests.helpers import small_pipeline_config, small_trial_set


def test_ablation_settings_start_with_full_model():
    settings = ablation_settings(["temporal", "posenc"])
    assert settings == [
        ("full", {}),
        ("without temporal", {"use_temporal": False}),
        ("without posenc", {"use_posenc": False}),
    ]


def test_unknown_ablation():
    with pytest.raises(ConfigurationError, match="Unknown ablation 'conv'"):
        ablation_settings(["conv"])


def test_sweep_keeps_heads_when_divisible():
    assert sweep_settings("slice_d", [5, 10, 20], n_heads=5) == [
        ("slice_d=5", {"slice_d": 5}),
        ("slice_d=10", {"slice_d": 10}),
        ("slice_d=20", {"slice_d": 20}),
    ]


def test_sweep_reduces_heads_for_indivisible_widths():
    settings = sweep_settings("slice_d", [2, 4], n_heads=5)
    assert settings[0][1] == {"slice_d": 2, "n_heads": 1}
    assert sweep_settings("slice_d", [4], n_heads=2)[0][1] == {"slice_d": 4}
    assert sweep_settings("slice_d", [6], n_heads=4)[0][1] == {"slice_d": 6, "n_heads": 2}


def test_kernel_sweep():
    assert sweep_settings("k_c", [3, 51]) == [("k_c=3", {"k_c": 3}), ("k_c=51", {"k_c": 51})]


def test_unknown_sweep_parameter():
    with pytest.raises(ConfigurationError):
        sweep_settings("n_heads", [1, 2])


def test_run_settings_applies_overrides():
    trial_set = small_trial_set(trials_per_class=6)
    config = small_pipeline_config(folds=2, epochs=1)
    results = run_settings(trial_set, config, ablation_settings(["ff"]), workers=1)
    assert len(results) == 2
    assert all(result.aggregate.n_trials == 12 for result in results)
    assert "use_ff" not in config.model
