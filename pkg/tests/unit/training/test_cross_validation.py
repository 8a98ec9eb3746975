"""Unit tests for stratified cross-validation."""

import threading

import numpy as np
import pytest

from s3t_decoder.errors import DataError
from s3t_decoder.training import run_cv, stratified_folds
from s3t_decoder.training.cross_validation import fold_seeds
from tests.helpers import small_pipeline_config, small_trial_set


def test_folds_partition_all_trials():
    labels = np.repeat(np.arange(4), 23)
    folds = stratified_folds(labels, 10, seed=3)
    combined = np.concatenate(folds)
    assert np.array_equal(np.sort(combined), np.arange(labels.size))
    sizes = [fold.size for fold in folds]
    assert max(sizes) - min(sizes) <= 1
    for fold in folds:
        counts = np.bincount(labels[fold], minlength=4)
        assert counts.min() >= 2


def test_every_class_is_spread_evenly():
    labels = np.array([0] * 17 + [1] * 11 + [2] * 30)
    folds = stratified_folds(labels, 5, seed=0)
    per_fold = np.array([np.bincount(labels[fold], minlength=3) for fold in folds])
    assert np.all(per_fold.max(axis=0) - per_fold.min(axis=0) <= 1)
    np.testing.assert_array_equal(per_fold.sum(axis=0), [17, 11, 30])


def test_folds_depend_on_seed_only():
    labels = np.repeat(np.arange(3), 12)
    first = stratified_folds(labels, 4, seed=7)
    second = stratified_folds(labels, 4, seed=7)
    other = stratified_folds(labels, 4, seed=8)
    assert all(np.array_equal(a, b) for a, b in zip(first, second, strict=True))
    assert not all(np.array_equal(a, b) for a, b in zip(first, other, strict=True))


def test_class_with_too_few_trials():
    labels = np.array([0] * 10 + [1] * 3)
    with pytest.raises(DataError, match="Class 1 has 3 trials"):
        stratified_folds(labels, 5, seed=0)


def test_fold_seeds_are_distinct_and_reproducible():
    seeds = fold_seeds(0, 10)
    assert len(set(seeds)) == 10
    assert seeds == fold_seeds(0, 10)
    assert seeds != fold_seeds(1, 10)


def test_two_folds_over_twenty_trials():
    trial_set = small_trial_set(trials_per_class=10)
    result = run_cv(trial_set, small_pipeline_config(folds=2))
    assert len(result.folds) == 2
    assert all(fold.test_indices.size == 10 for fold in result.folds)
    assert result.aggregate.n_trials == 20
    assert result.fold_accuracies == [fold.accuracy for fold in result.folds]
    assert result.mean_accuracy == pytest.approx(np.mean(result.fold_accuracies))
    assert result.std_accuracy == pytest.approx(np.std(result.fold_accuracies))
    assert all(len(fold.loss_curve) == 2 for fold in result.folds)


def test_fitting_never_sees_test_trials():
    trial_set = small_trial_set(trials_per_class=9)
    config = small_pipeline_config(folds=3, epochs=1)
    seen: list[tuple[str, int, np.ndarray]] = []
    lock = threading.Lock()

    def observer(stage, fold, indices):
        with lock:
            seen.append((stage, fold, indices.copy()))

    result = run_cv(trial_set, config, observer=observer)

    assert sorted((stage, fold) for stage, fold, _ in seen) == sorted(
        (stage, fold) for stage in ("standardization", "csp") for fold in range(3)
    )
    test_sets = {fold.fold: set(fold.test_indices.tolist()) for fold in result.folds}
    for _, fold, indices in seen:
        assert test_sets[fold].isdisjoint(indices.tolist())
        assert len(indices) + len(test_sets[fold]) == len(trial_set)


def test_fold_statistics_come_from_training_trials():
    trial_set = small_trial_set(trials_per_class=10)
    result = run_cv(trial_set, small_pipeline_config(folds=2, epochs=1))
    for fold in result.folds:
        train_data = trial_set.data[fold.train_indices]
        np.testing.assert_allclose(fold.stats.mean, train_data.mean(axis=(0, 2)))
        assert fold.spatial_filter.n_feature_channels == 2


def test_cross_validation_is_deterministic():
    trial_set = small_trial_set(trials_per_class=10)
    config = small_pipeline_config(folds=2, epochs=2)
    first = run_cv(trial_set, config, workers=2)
    second = run_cv(trial_set, config, workers=1)
    np.testing.assert_array_equal(first.aggregate.confusion, second.aggregate.confusion)
    assert [f.loss_curve for f in first.folds] == [f.loss_curve for f in second.folds]
