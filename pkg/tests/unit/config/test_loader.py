"""Test the pipeline config loader."""

import json
from pathlib import Path

import pytest

from s3t_decoder.config import (
    PipelineConfig,
    TrainConfig,
    config_to_dict,
    load_config,
    preset,
)
from s3t_decoder.config import constants
from s3t_decoder.errors import ConfigurationError


def _write(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_presets_match_datasets():
    four_class = preset("bci-iv-2a")
    assert four_class.n_classes == 4
    assert four_class.n_rows == constants.ROWS_2A
    assert four_class.preprocess.window == constants.WINDOW_2A
    assert four_class.n_feature_channels == 4 * constants.ROWS_2A

    binary = preset("bci-iv-2b")
    assert binary.n_classes == 2
    assert binary.preprocess.window == constants.WINDOW_2B
    assert binary.n_feature_channels == constants.ROWS_2B


def test_unknown_preset():
    with pytest.raises(ConfigurationError, match="Available options"):
        preset("bci-iii")


def test_default_training_settings():
    train = TrainConfig()
    assert train.learning_rate == 2e-4
    assert (train.beta1, train.beta2) == (0.5, 0.9)
    assert train.batch_size == 50
    assert train.folds == 10


def test_load_standalone_config(tmp_path):
    path = _write(
        tmp_path,
        {
            "n_classes": 3,
            "n_rows": 2,
            "preprocess": {"window": "0.5:2.5", "low": 8.0},
            "model": {"slice_d": 5, "n_heads": 1},
            "train": {"epochs": 20, "learning_rate": 1e-3},
        },
    )
    config = load_config(path)
    assert config.n_feature_channels == 6
    assert config.preprocess.window == (0.5, 2.5)
    assert config.preprocess.low == 8.0
    assert config.preprocess.high == constants.BAND_HIGH_HZ
    assert config.model == {"slice_d": 5, "n_heads": 1}
    assert config.train.epochs == 20
    assert config.train.batch_size == constants.BATCH_SIZE


def test_file_overrides_base(tmp_path):
    base = preset("bci-iv-2a")
    base.model["n_a"] = 2
    path = _write(tmp_path, {"model": {"slice_d": 20}, "train": {"seed": 4}})
    config = load_config(path, base=base)
    assert config.n_classes == 4
    assert config.model == {"n_a": 2, "slice_d": 20}
    assert config.train.seed == 4
    assert config.preprocess.window == constants.WINDOW_2A


def test_class_count_required_without_base(tmp_path):
    with pytest.raises(ConfigurationError, match="n_classes"):
        load_config(_write(tmp_path, {"train": {"epochs": 1}}))


def test_unknown_train_key(tmp_path):
    path = _write(tmp_path, {"n_classes": 2, "n_rows": 1, "train": {"momentum": 0.9}})
    with pytest.raises(ConfigurationError, match="Invalid config file"):
        load_config(path)


def test_unknown_model_key(tmp_path):
    path = _write(tmp_path, {"n_classes": 2, "n_rows": 1, "model": {"depth": 3}})
    with pytest.raises(ConfigurationError, match="depth"):
        load_config(path)


def test_invalid_values(tmp_path):
    with pytest.raises(ConfigurationError, match="folds"):
        load_config(_write(tmp_path, {"n_classes": 2, "n_rows": 1, "train": {"folds": 1}}))
    with pytest.raises(ConfigurationError, match="Invalid band"):
        load_config(
            _write(tmp_path, {"n_classes": 2, "n_rows": 1, "preprocess": {"low": 40, "high": 4}})
        )


def test_invalid_json(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(json.JSONDecodeError):
        load_config(str(path))


def test_model_config_validation():
    config = PipelineConfig(n_classes=4, n_rows=2, model={"slice_d": 7})
    with pytest.raises(ConfigurationError, match="not divisible by slice_d"):
        config.model_config(n_samples=40)
    model = PipelineConfig(n_classes=4, n_rows=2, model={"slice_d": 10, "k_c": 5}).model_config(40)
    assert model.n_feature_channels == 8
    assert model.n_slices == 4
    assert model.d_k == 10


def test_ablated_copy():
    model = PipelineConfig(n_classes=2, n_rows=2, model={"slice_d": 10, "k_c": 5}).model_config(40)
    assert not model.without("ff").use_ff
    assert model.use_ff
    with pytest.raises(ConfigurationError):
        model.without("conv")


def test_config_to_dict_is_json_ready():
    data = config_to_dict(preset("bci-iv-2b"))
    assert json.loads(json.dumps(data))["n_classes"] == 2


def test_template_matches_defaults():
    template = Path(__file__).resolve().parents[3] / "config" / "s3t_config.template.json"
    config = load_config(str(template))
    defaults = preset("bci-iv-2a")
    assert config.preprocess == defaults.preprocess
    assert config.train == defaults.train
    assert config.model_config(1000) == defaults.model_config(1000)
