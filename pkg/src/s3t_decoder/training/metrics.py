"""Confusion matrices and per-class classification metrics, reported in percent."""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from sklearn.metrics import confusion_matrix as sk_confusion_matrix
from sklearn.metrics import multilabel_confusion_matrix, precision_recall_fscore_support

from s3t_decoder.config.config_loader import ModelConfig
from s3t_decoder.errors import DataError, DimensionError
from s3t_decoder.model import ModelParams, predict
from s3t_decoder.training.loss import validate_labels


@dataclass(frozen=True)
class ClassMetrics:
    """One-versus-rest rates of a single class; ``None`` marks an undefined ratio."""

    accuracy: float | None
    precision: float | None
    recall: float | None
    specificity: float | None
    f_score: float | None


@dataclass
class EvalReport:
    """Confusion matrix (rows are true classes) and the metrics derived from it."""

    confusion: np.ndarray
    per_class: list[ClassMetrics]
    overall_accuracy: float
    fold_accuracies: list[float] = field(default_factory=list)

    @property
    def n_classes(self) -> int:
        return self.confusion.shape[0]

    @property
    def n_trials(self) -> int:
        return int(self.confusion.sum())

    @property
    def mean_accuracy(self) -> float:
        if self.fold_accuracies:
            return float(np.mean(self.fold_accuracies))
        return self.overall_accuracy

    @property
    def std_accuracy(self) -> float:
        if len(self.fold_accuracies) < 2:
            return 0.0
        return float(np.std(self.fold_accuracies))


def _percent(rate) -> float | None:
    """Scale a rate to percent; NaN marks an undefined ratio and becomes ``None``."""
    rate = float(rate)
    return None if np.isnan(rate) else 100.0 * rate


def f_score(precision: float | None, recall: float | None) -> float | None:
    """Harmonic mean ``2PR / (P + R)``; 0 when both rates are 0, undefined if either is."""
    if precision is None or recall is None:
        return None
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def confusion_matrix(true_labels, predicted_labels, n_classes: int) -> np.ndarray:
    """Counts with rows indexed by true class and columns by predicted class."""
    true_labels = validate_labels(true_labels, n_classes)
    predicted_labels = validate_labels(predicted_labels, n_classes)
    if true_labels.shape != predicted_labels.shape:
        raise DimensionError(
            f"{true_labels.shape[0]} true labels but {predicted_labels.shape[0]} predictions"
        )
    if true_labels.size == 0:
        return np.zeros((n_classes, n_classes), dtype=np.int64)
    return sk_confusion_matrix(
        true_labels, predicted_labels, labels=np.arange(n_classes)
    ).astype(np.int64)


def _label_pairs(confusion: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Expand a confusion matrix back into (true, predicted) label arrays."""
    n_classes = confusion.shape[0]
    cells = np.repeat(np.arange(n_classes * n_classes), confusion.ravel())
    return cells // n_classes, cells % n_classes


def per_class_metrics(confusion: np.ndarray) -> list[ClassMetrics]:
    """One-versus-rest metrics of every class of a non-empty confusion matrix."""
    confusion = np.asarray(confusion, dtype=np.int64)
    labels = np.arange(confusion.shape[0])
    true, predicted = _label_pairs(confusion)
    precision, recall, _, _ = precision_recall_fscore_support(
        true, predicted, labels=labels, average=None, zero_division=np.nan
    )
    # Each block is [[tn, fp], [fn, tp]] for one class.
    blocks = multilabel_confusion_matrix(true, predicted, labels=labels)
    total = confusion.sum()
    metrics = []
    for k, ((tn, fp), (_, tp)) in enumerate(blocks):
        negatives = tn + fp
        class_precision, class_recall = _percent(precision[k]), _percent(recall[k])
        metrics.append(
            ClassMetrics(
                accuracy=float(100.0 * (tp + tn) / total),
                precision=class_precision,
                recall=class_recall,
                specificity=float(100.0 * tn / negatives) if negatives else None,
                f_score=f_score(class_precision, class_recall),
            )
        )
    return metrics


def class_metrics(confusion: np.ndarray, k: int) -> ClassMetrics:
    """Treat class ``k`` as positive and every other class as negative."""
    return per_class_metrics(confusion)[k]


def report_from_confusion(
    confusion: np.ndarray, fold_accuracies: Sequence[float] = ()
) -> EvalReport:
    """Derive every metric from a confusion matrix.

    Raises:
        DataError: If the matrix holds no trials
    """
    confusion = np.asarray(confusion, dtype=np.int64)
    if confusion.ndim != 2 or confusion.shape[0] != confusion.shape[1]:
        raise DimensionError(f"Confusion matrix must be square, got shape {confusion.shape}")
    total = confusion.sum()
    if total == 0:
        raise DataError("Cannot evaluate an empty set of predictions")
    return EvalReport(
        confusion=confusion,
        per_class=per_class_metrics(confusion),
        overall_accuracy=100.0 * np.trace(confusion) / total,
        fold_accuracies=list(fold_accuracies),
    )


def evaluate(params: ModelParams, config: ModelConfig, data: np.ndarray, labels) -> EvalReport:
    """Classify ``data`` in eval mode (argmax of the probabilities) and score it."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 3 or data.shape[0] == 0:
        raise DataError(f"Evaluation needs a non-empty (M, C_f, T) array, got shape {data.shape}")
    predictions = predict(data, params, config).argmax(axis=-1)
    return report_from_confusion(confusion_matrix(labels, predictions, config.n_classes))
