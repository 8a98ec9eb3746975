"""Stratified k-fold cross-validation of the full decoding pipeline.

Every fold fits its standardization statistics and its spatial filter on the
training portion only, trains a fresh network and scores the held-out portion.
Folds are independent and run on a thread pool.
"""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.model_selection import StratifiedKFold

from s3t_decoder.config.config_loader import PipelineConfig
from s3t_decoder.csp import SpatialFilter, apply_filter, fit_ovr_filter
from s3t_decoder.errors import DataError
from s3t_decoder.log_messages import LOG_CV_DONE, LOG_FOLD_DONE, LOG_FOLD_START
from s3t_decoder.logger import Logger
from s3t_decoder.preprocess import StandardizationStats, TrialSet, fit_standardization, standardize
from s3t_decoder.training.metrics import EvalReport, evaluate, report_from_confusion
from s3t_decoder.training.trainer import train
from s3t_decoder.utils.system import get_worker_count

# Receives (stage, fold, trial indices) before a statistic is fitted on those trials.
FitObserver = Callable[[str, int, np.ndarray], None]


@dataclass
class FoldResult:
    """Outcome of one train/test split."""

    fold: int
    train_indices: np.ndarray
    test_indices: np.ndarray
    report: EvalReport
    loss_curve: list[float] = field(default_factory=list)
    stats: StandardizationStats | None = None
    spatial_filter: SpatialFilter | None = None

    @property
    def accuracy(self) -> float:
        return self.report.overall_accuracy


@dataclass
class CVResult:
    """Per-fold results plus the pooled report over all folds."""

    folds: list[FoldResult]
    aggregate: EvalReport

    @property
    def reports(self) -> list[EvalReport]:
        return [fold.report for fold in self.folds]

    @property
    def fold_accuracies(self) -> list[float]:
        return self.aggregate.fold_accuracies

    @property
    def mean_accuracy(self) -> float:
        return self.aggregate.mean_accuracy

    @property
    def std_accuracy(self) -> float:
        return self.aggregate.std_accuracy


def stratified_folds(labels, n_folds: int, seed: int) -> list[np.ndarray]:
    """Split trial indices into ``n_folds`` disjoint, exhaustive test sets.

    Shuffled stratified k-fold with the seed as ``random_state``; per-class counts
    and fold sizes differ by at most one between folds.

    Raises:
        DataError: If some present class has fewer trials than folds
    """
    labels = np.asarray(labels, dtype=np.int64)
    classes, counts = np.unique(labels, return_counts=True)
    for label, count in zip(classes, counts, strict=True):
        if count < n_folds:
            raise DataError(
                f"Class {label} has {count} trials; {n_folds}-fold cross-validation "
                f"needs at least {n_folds} per class"
            )
    splitter = StratifiedKFold(n_splits=n_folds, shuffle=True, random_state=seed)
    placeholder = np.zeros((labels.shape[0], 1))
    return [np.sort(test) for _, test in splitter.split(placeholder, labels)]


def fold_seeds(seed: int, n_folds: int) -> list[int]:
    """Independent training seeds for each fold derived from the run seed."""
    return [
        int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(n_folds)
    ]


def run_fold(
    trial_set: TrialSet,
    train_indices: np.ndarray,
    test_indices: np.ndarray,
    config: PipelineConfig,
    *,
    fold: int = 0,
    seed: int | None = None,
    observer: FitObserver | None = None,
) -> FoldResult:
    """Standardize, spatially filter, train and evaluate one split.

    Args:
        trial_set: All trials of the run
        train_indices: Trials used for fitting statistics, the filter and the network
        test_indices: Held-out trials; only transformed, never fitted on
        config: Pipeline settings
        fold: Fold number, for logging and the observer
        seed: Training seed; defaults to ``config.train.seed``
        observer: Called before each fitting stage with the indices it sees
    """
    train_trials = [trial_set[i] for i in train_indices]
    test_trials = [trial_set[i] for i in test_indices]

    if observer is not None:
        observer("standardization", fold, np.asarray(train_indices))
    stats = fit_standardization(train_trials)
    train_trials = [standardize(trial, stats) for trial in train_trials]
    test_trials = [standardize(trial, stats) for trial in test_trials]

    if observer is not None:
        observer("csp", fold, np.asarray(train_indices))
    spatial_filter = fit_ovr_filter(train_trials, config.n_classes, config.n_rows)
    train_data = apply_filter(spatial_filter, np.stack([trial.data for trial in train_trials]))
    test_data = apply_filter(spatial_filter, np.stack([trial.data for trial in test_trials]))

    model_config = config.model_config(trial_set.n_samples)
    train_config = config.train if seed is None else replace(config.train, seed=seed)
    result = train(
        train_data,
        [trial.label for trial in train_trials],
        model_config,
        train_config,
    )
    report = evaluate(
        result.params, model_config, test_data, [trial.label for trial in test_trials]
    )
    return FoldResult(
        fold=fold,
        train_indices=np.asarray(train_indices),
        test_indices=np.asarray(test_indices),
        report=report,
        loss_curve=result.loss_curve,
        stats=stats,
        spatial_filter=spatial_filter,
    )


def run_cv(
    trial_set: TrialSet,
    config: PipelineConfig,
    *,
    observer: FitObserver | None = None,
    workers: int | None = None,
) -> CVResult:
    """Stratified k-fold cross-validation of the complete pipeline.

    Args:
        trial_set: Band-passed, segmented trials of one subject
        config: Pipeline settings; ``config.train.folds`` sets k and
            ``config.train.seed`` fixes the split and every fold's training
        observer: Instrumentation hook, see ``FitObserver``
        workers: Thread count; sized from the host when omitted

    Returns:
        CVResult with one report per fold and a pooled aggregate

    Raises:
        DataError: If a class has fewer trials than folds
    """
    config.validate()
    n_folds = config.train.folds
    test_sets = stratified_folds(trial_set.labels, n_folds, config.train.seed)
    seeds = fold_seeds(config.train.seed, n_folds)
    all_indices = np.arange(len(trial_set))

    def _run(fold: int) -> FoldResult:
        test_indices = test_sets[fold]
        train_indices = np.setdiff1d(all_indices, test_indices)
        Logger.print_info(
            LOG_FOLD_START.format(
                fold=fold + 1, folds=n_folds, n_train=train_indices.size, n_test=test_indices.size
            )
        )
        result = run_fold(
            trial_set,
            train_indices,
            test_indices,
            config,
            fold=fold,
            seed=seeds[fold],
            observer=observer,
        )
        Logger.print_info(LOG_FOLD_DONE.format(fold=fold + 1, folds=n_folds, accuracy=result.accuracy))
        return result

    workers = workers or config.train.workers or get_worker_count(n_folds)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(_run, fold) for fold in range(n_folds)]
        folds = [future.result() for future in futures]

    aggregate = report_from_confusion(
        sum(fold.report.confusion for fold in folds),
        fold_accuracies=[fold.accuracy for fold in folds],
    )
    Logger.print_info(LOG_CV_DONE.format(mean=aggregate.mean_accuracy, std=aggregate.std_accuracy))
    return CVResult(folds=folds, aggregate=aggregate)
