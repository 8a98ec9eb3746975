"""Unit tests for tabular result summaries."""

import numpy as np
import pytest

from s3t_decoder.training import confusion_matrix, report_from_confusion
from s3t_decoder.training.reporting import (
    UNDEFINED,
    comparison_table,
    confusion_table,
    format_report,
    per_class_table,
    subject_summary,
)


@pytest.fixture
def report():
    confusion = confusion_matrix([0, 0, 0, 1, 1, 1], [0, 0, 1, 1, 1, 1], 3)
    return report_from_confusion(confusion, fold_accuracies=[100.0, 66.0])


def test_per_class_table(report):
    table = per_class_table(report)
    assert list(table.index) == ["c0", "c1", "c2"]
    assert table.loc["c0", "precision"] == "100.00"
    assert table.loc["c0", "recall"] == "66.67"
    assert table.loc["c1", "precision"] == "75.00"
    assert table.loc["c2", "recall"] == UNDEFINED


def test_confusion_table_axes(report):
    table = confusion_table(report)
    assert table.index.name == "true"
    assert table.columns.name == "predicted"
    assert table.loc["c0", "c1"] == 1


def test_format_report_mentions_folds(report):
    text = format_report(report)
    assert "overall accuracy: 83.33" in text
    assert "fold accuracies: 100.00, 66.00" in text
    assert "mean accuracy: 83.00 (std 17.00)" in text


def test_comparison_table():
    class _Result:
        def __init__(self, mean, std):
            self.mean_accuracy, self.std_accuracy = mean, std

    table = comparison_table(["full", "without ff"], [_Result(91.234, 2.0), _Result(88.0, 3.456)])
    assert table["setting"].tolist() == ["full", "without ff"]
    assert table["mean_accuracy"].tolist() == [91.23, 88.0]
    assert table["std_accuracy"].tolist() == [2.0, 3.46]


def test_subject_summary():
    table = subject_summary([80.0, 90.0], [70.0, 70.0], ("ours", "baseline"))
    assert list(table.index) == ["S1", "S2", "Average", "std"]
    assert table.loc["Average", "ours"] == 85.0
    assert table.loc["std", "ours"] == 5.0
    assert table.loc["std", "baseline"] == 0.0
    assert np.isclose(table.loc["S2", "baseline"], 70.0)
