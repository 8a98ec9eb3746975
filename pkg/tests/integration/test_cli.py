"""Integration tests driving the s3t-decoder command line end to end."""

import numpy as np
import pandas as pd
import pytest

from s3t_decoder.cli import main
from s3t_decoder.dataio import read_checkpoint, read_filter, read_report, read_stats, read_trial_set
from s3t_decoder.errors import EXIT_DATA, EXIT_OK, EXIT_USAGE

pytestmark = pytest.mark.integration

SMALL_MODEL = ["--slice", "4", "--heads", "2", "--kc", "5", "--nf", "2", "--na", "1"]


@pytest.fixture
def trials_path(tmp_path):
    path = tmp_path / "trials.bin"
    code = main(
        [
            "synth",
            "--out", str(path),
            "--classes", "2",
            "--trials-per-class", "10",
            "--channels", "4",
            "--samples", "200",
            "--seed", "3",
        ]
    )
    assert code == EXIT_OK
    return path


def test_synth_writes_trial_set(trials_path):
    trial_set = read_trial_set(trials_path)
    assert len(trial_set) == 20
    assert trial_set.data.shape == (20, 4, 200)
    assert trial_set.n_classes == 2


def test_pipeline_stages(trials_path, tmp_path, capsys):
    standardized = tmp_path / "standardized.bin"
    stats = tmp_path / "stats.bin"
    spatial_filter = tmp_path / "filter.bin"
    checkpoint = tmp_path / "model.ckpt"
    losses = tmp_path / "loss.csv"
    report = tmp_path / "report.txt"

    assert main(
        ["preprocess", "--input", str(trials_path), "--out", str(standardized),
         "--band", "4:40", "--stats-out", str(stats)]
    ) == EXIT_OK
    data = read_trial_set(standardized).data
    np.testing.assert_allclose(data.mean(axis=(0, 2)), 0.0, atol=1e-10)
    np.testing.assert_allclose(data.var(axis=(0, 2)), 1.0, rtol=1e-10)
    assert read_stats(stats).n_channels == 4

    assert main(
        ["fit-csp", "--input", str(standardized), "--out", str(spatial_filter),
         "--classes", "2", "--rows", "2"]
    ) == EXIT_OK
    assert read_filter(spatial_filter).W.shape == (2, 4)

    assert main(
        ["train", "--input", str(standardized), "--out", str(checkpoint),
         "--filter", str(spatial_filter), "--classes", "2", "--rows", "2",
         "--epochs", "2", "--batch", "10", "--loss-out", str(losses), *SMALL_MODEL]
    ) == EXIT_OK
    model_config, _ = read_checkpoint(checkpoint)
    assert model_config.n_feature_channels == 2
    assert model_config.n_samples == 200
    assert pd.read_csv(losses)["epoch"].tolist() == [1, 2]

    assert main(
        ["eval", "--checkpoint", str(checkpoint), "--filter", str(spatial_filter),
         "--input", str(standardized), "--out", str(report)]
    ) == EXIT_OK
    assert read_report(report).n_trials == 20
    assert "overall accuracy" in capsys.readouterr().out


def test_preprocess_reuses_statistics(trials_path, tmp_path):
    stats = tmp_path / "stats.bin"
    first, second = tmp_path / "first.bin", tmp_path / "second.bin"
    assert main(
        ["preprocess", "--input", str(trials_path), "--out", str(first), "--stats-out", str(stats)]
    ) == EXIT_OK
    assert main(
        ["preprocess", "--input", str(trials_path), "--out", str(second), "--stats-in", str(stats)]
    ) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_cv_prints_ten_folds(trials_path, tmp_path, capsys):
    folds = tmp_path / "folds.csv"
    code = main(
        ["cv", "--input", str(trials_path), "--classes", "2", "--rows", "2",
         "--epochs", "1", "--batch", "10", "--folds-out", str(folds), *SMALL_MODEL]
    )
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "mean accuracy" in out
    assert len(pd.read_csv(folds)) == 10


def test_cv_reports_are_byte_identical(trials_path, tmp_path):
    reports = [tmp_path / "a.txt", tmp_path / "b.txt"]
    for report in reports:
        assert main(
            ["cv", "--input", str(trials_path), "--classes", "2", "--rows", "2", "--folds", "2",
             "--epochs", "2", "--batch", "10", "--seed", "5", "--out", str(report), *SMALL_MODEL]
        ) == EXIT_OK
    assert reports[0].read_bytes() == reports[1].read_bytes()


def test_train_honours_window_and_band(trials_path, tmp_path):
    checkpoint = tmp_path / "cropped.ckpt"
    assert main(
        ["train", "--input", str(trials_path), "--out", str(checkpoint), "--classes", "2",
         "--rows", "2", "--epochs", "1", "--batch", "10", "--band", "8:30", "--window", "0:1.2",
         *SMALL_MODEL]
    ) == EXIT_OK
    model_config, _ = read_checkpoint(checkpoint)
    assert model_config.n_samples == 120


@pytest.mark.parametrize(
    "command",
    [["cv"], ["ablate", "--drop", "ff"], ["sweep", "--param", "slice_d", "--values", "4"]],
)
def test_cross_validating_commands_read_the_window(command, trials_path):
    code = main(
        [*command, "--input", str(trials_path), "--classes", "2", "--rows", "2", "--folds", "2",
         "--epochs", "1", "--window", "0:5", *SMALL_MODEL]
    )
    assert code == EXIT_DATA


@pytest.mark.parametrize("preset, expected", [("bci-iv-2a", "7702"), ("bci-iv-2b", "6224")])
def test_params_for_presets(preset, expected, capsys):
    assert main(["params", "--preset", preset]) == EXIT_OK
    assert capsys.readouterr().out.strip() == expected


def test_compare_paired_accuracies(tmp_path, capsys):
    baseline = [67.8, 55.2, 81.3, 61.0, 55.0, 45.3, 82.8, 81.3, 70.8]
    pd.DataFrame({"accuracy": [value + 10 for value in baseline]}).to_csv(
        tmp_path / "ours.csv", index=False
    )
    pd.DataFrame({"accuracy": baseline}).to_csv(tmp_path / "baseline.csv", index=False)

    code = main(
        ["compare", "--a", str(tmp_path / "ours.csv"), "--b", str(tmp_path / "baseline.csv"),
         "--names", "ours,baseline"]
    )

    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "Average" in out
    assert "p=0.003906" in out


def test_gradcheck_passes(capsys):
    assert main(["gradcheck", "--coordinates", "2"]) == EXIT_OK
    assert "relative_error" in capsys.readouterr().out


class TestExitCodes:
    def test_missing_input_file(self, tmp_path):
        assert main(
            ["train", "--input", str(tmp_path / "missing.bin"), "--out", str(tmp_path / "m")]
        ) == EXIT_DATA

    def test_foreign_checkpoint(self, trials_path, tmp_path):
        assert main(
            ["eval", "--checkpoint", str(trials_path), "--filter", str(trials_path),
             "--input", str(trials_path)]
        ) == EXIT_DATA

    def test_invalid_json_config(self, trials_path, tmp_path):
        config = tmp_path / "config.json"
        config.write_text("{oops", encoding="utf-8")
        assert main(["cv", "--input", str(trials_path), "--config", str(config)]) == EXIT_USAGE

    def test_unknown_preset(self):
        assert main(["params", "--preset", "bci-iii"]) == EXIT_USAGE

    def test_unknown_ablation(self, trials_path):
        assert main(
            ["ablate", "--input", str(trials_path), "--classes", "2", "--drop", "conv"]
        ) == EXIT_USAGE

    def test_class_count_mismatch(self, trials_path):
        assert main(["cv", "--input", str(trials_path), "--classes", "4"]) == EXIT_DATA
