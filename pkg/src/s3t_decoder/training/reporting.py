"""Tabular summaries of evaluation and cross-validation results."""

from collections.abc import Sequence

import pandas as pd

from s3t_decoder.training.cross_validation import CVResult
from s3t_decoder.training.metrics import EvalReport

UNDEFINED = "undefined"
METRIC_COLUMNS = ("accuracy", "precision", "recall", "specificity", "f_score")


def _format_rate(value: float | None) -> str:
    return UNDEFINED if value is None else f"{value:.2f}"


def per_class_table(report: EvalReport) -> pd.DataFrame:
    """One row per class with every OVR rate, formatted to two decimals."""
    rows = {
        f"c{k}": {column: _format_rate(getattr(metrics, column)) for column in METRIC_COLUMNS}
        for k, metrics in enumerate(report.per_class)
    }
    return pd.DataFrame.from_dict(rows, orient="index", columns=list(METRIC_COLUMNS))


def confusion_table(report: EvalReport) -> pd.DataFrame:
    """Counts with true classes as rows and predicted classes as columns."""
    labels = [f"c{k}" for k in range(report.n_classes)]
    return pd.DataFrame(
        report.confusion,
        index=pd.Index(labels, name="true"),
        columns=pd.Index(labels, name="predicted"),
    )


def fold_table(result: CVResult) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "fold": [fold.fold + 1 for fold in result.folds],
            "n_test": [fold.test_indices.size for fold in result.folds],
            "accuracy": [round(fold.accuracy, 2) for fold in result.folds],
        }
    )


def format_report(report: EvalReport) -> str:
    """Per-class metrics, confusion matrix and accuracy as printable text."""
    lines = [
        per_class_table(report).to_string(),
        "",
        confusion_table(report).to_string(),
        "",
        f"overall accuracy: {report.overall_accuracy:.2f}",
    ]
    if report.fold_accuracies:
        folds = ", ".join(f"{accuracy:.2f}" for accuracy in report.fold_accuracies)
        lines.append(f"fold accuracies: {folds}")
        lines.append(f"mean accuracy: {report.mean_accuracy:.2f} (std {report.std_accuracy:.2f})")
    return "\n".join(lines)


def comparison_table(labels: Sequence[str], results: Sequence[CVResult]) -> pd.DataFrame:
    """One row per ablation or sweep setting with its CV mean and std accuracy."""
    return pd.DataFrame(
        {
            "setting": list(labels),
            "mean_accuracy": [round(result.mean_accuracy, 2) for result in results],
            "std_accuracy": [round(result.std_accuracy, 2) for result in results],
        }
    )


def subject_summary(a: Sequence[float], b: Sequence[float], names: tuple[str, str]) -> pd.DataFrame:
    """Per-subject accuracies of two methods with Average and std rows appended."""
    table = pd.DataFrame({names[0]: list(a), names[1]: list(b)})
    table.index = [f"S{i + 1}" for i in range(len(table))]
    summary = pd.DataFrame(
        [table.mean(), table.std(ddof=0)], index=["Average", "std"]
    )
    return pd.concat([table, summary]).round(2)
