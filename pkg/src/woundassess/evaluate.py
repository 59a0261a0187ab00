"""Confusion matrices, precision/recall, ROC curves and scatter export.

Undefined metrics (zero denominators, single-class ROC) are reported as None.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .bands import CLASSES, AssessmentClass, SensorReading
from .preprocess import NormalizationParams, fit_params, min_max_normalize


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with rows = true class, columns = predicted class, in CLASSES order."""

    counts: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if len(self.counts) != 3 or any(len(r) != 3 for r in self.counts):
            raise ValueError("confusion matrix must be 3x3")
        if any(c < 0 for r in self.counts for c in r):
            raise ValueError("confusion counts must be non-negative")

    @classmethod
    def from_rows(cls, rows) -> "ConfusionMatrix":
        return cls(tuple(tuple(int(c) for c in r) for r in rows))

    def cell(self, truth: AssessmentClass, predicted: AssessmentClass) -> int:
        return self.counts[CLASSES.index(truth)][CLASSES.index(predicted)]

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    def row_total(self, truth: AssessmentClass) -> int:
        return sum(self.counts[CLASSES.index(truth)])

    def column_total(self, predicted: AssessmentClass) -> int:
        j = CLASSES.index(predicted)
        return sum(r[j] for r in self.counts)

    def as_array(self) -> np.ndarray:
        return np.array(self.counts)


def confusion(truth: Sequence[AssessmentClass], predicted: Sequence[AssessmentClass]) -> ConfusionMatrix:
    if len(truth) != len(predicted):
        raise ValueError(f"length mismatch: {len(truth)} truths, {len(predicted)} predictions")
    if not truth:
        raise ValueError("need at least one prediction")
    m = [[0] * 3 for _ in CLASSES]
    for t, p in zip(truth, predicted):
        m[CLASSES.index(t)][CLASSES.index(p)] += 1
    return ConfusionMatrix.from_rows(m)


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ValueError("accuracy of an empty confusion matrix")
    return sum(cm.counts[i][i] for i in range(3)) / cm.total


@dataclass(frozen=True)
class BatchOutcome:
    """Per-batch tallies: rows that got a prediction, rows that did not, and how many were right."""

    total_predicted: int
    not_predicted: int
    correctly_predicted: int
    wrongly_predicted: int

    def __post_init__(self):
        if min(self.total_predicted, self.not_predicted,
               self.correctly_predicted, self.wrongly_predicted) < 0:
            raise ValueError("batch tallies must be non-negative")
        if self.correctly_predicted + self.wrongly_predicted != self.total_predicted:
            raise ValueError("correct + wrong predictions must equal total predicted")

    @property
    def sample_size(self) -> int:
        return self.total_predicted + self.not_predicted


def batch_metrics(outcome: BatchOutcome) -> tuple[Optional[float], Optional[float]]:
    """Batch (precision, recall) where TP counts every predicted row.

    precision = TP / (TP + WP), recall = TP / (TP + NP).
    """
    tp, wp, np_ = outcome.total_predicted, outcome.wrongly_predicted, outcome.not_predicted
    precision = tp / (tp + wp) if tp + wp else None
    recall = tp / (tp + np_) if tp + np_ else None
    return precision, recall


def batch_percent(outcome: BatchOutcome) -> tuple[Optional[int], Optional[int]]:
    """Batch metrics as whole percentages, truncated as in the published prediction table."""
    tp, wp, np_ = outcome.total_predicted, outcome.wrongly_predicted, outcome.not_predicted
    precision = 100 * tp // (tp + wp) if tp + wp else None
    recall = 100 * tp // (tp + np_) if tp + np_ else None
    return precision, recall


class PrecisionRecall(NamedTuple):
    precision: Optional[float]
    recall: Optional[float]


def per_class_precision_recall(cm: ConfusionMatrix) -> dict[AssessmentClass, PrecisionRecall]:
    out = {}
    for c in CLASSES:
        hit = cm.cell(c, c)
        col, row = cm.column_total(c), cm.row_total(c)
        out[c] = PrecisionRecall(hit / col if col else None, hit / row if row else None)
    return out


class RocPoint(NamedTuple):
    threshold: float
    tpr: float
    fpr: float


@dataclass(frozen=True)
class RocCurve:
    positive: AssessmentClass
    points: tuple[RocPoint, ...]

    def auc(self) -> float:
        fpr = np.array([p.fpr for p in self.points])
        tpr = np.array([p.tpr for p in self.points])
        return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2))


def roc_one_vs_rest(scores: Sequence[Sequence[float]], truth: Sequence[AssessmentClass],
                    positive: AssessmentClass) -> tuple[Optional[RocCurve], Optional[float]]:
    """ROC of ``positive`` against the rest, sweeping thresholds over distinct scores.

    ``scores`` rows are probability triples in CLASSES order. Tied scores
    move TPR and FPR together, so constant scores give the chance diagonal.
    """
    if len(scores) != len(truth):
        raise ValueError(f"length mismatch: {len(scores)} score rows, {len(truth)} labels")
    col = CLASSES.index(positive)
    s = np.array([row[col] for row in scores], dtype=float)
    is_pos = np.array([t is positive for t in truth])
    n_pos, n_neg = int(is_pos.sum()), int((~is_pos).sum())
    if n_pos == 0 or n_neg == 0:
        return None, None
    points = [RocPoint(float("inf"), 0.0, 0.0)]
    for thr in np.unique(s)[::-1]:
        above = s >= thr
        points.append(RocPoint(float(thr), float((above & is_pos).sum() / n_pos),
                               float((above & ~is_pos).sum() / n_neg)))
    curve = RocCurve(positive, tuple(points))
    return curve, curve.auc()


def macro_auc(scores, truth) -> tuple[Optional[float], dict[AssessmentClass, Optional[float]]]:
    """Mean of the one-vs-rest AUCs that are defined, plus the per-class values."""
    per_class = {c: roc_one_vs_rest(scores, truth, c)[1] for c in CLASSES}
    defined = [a for a in per_class.values() if a is not None]
    return (sum(defined) / len(defined) if defined else None), per_class


SCATTER_COLUMNS = ("x", "y", "true_class", "correct")
READING_FIELDS = ("body_temp", "air_temp", "humidity", "spo2")


def scatter_export(readings: Sequence[SensorReading], truth: Sequence[AssessmentClass],
                   predicted: Sequence[AssessmentClass], x_feature: str = "body_temp",
                   y_feature: str = "humidity", normalize: bool = False) -> list[tuple]:
    """Rows of (x, y, true class, prediction correct?) ready for plotting."""
    if not len(readings) == len(truth) == len(predicted):
        raise ValueError("readings, truth and predictions must align")
    for name in (x_feature, y_feature):
        if name not in READING_FIELDS:
            raise ValueError(f"unknown reading column {name!r}; choose from {READING_FIELDS}")
    xs = [getattr(r, x_feature) for r in readings]
    ys = [getattr(r, y_feature) for r in readings]
    if normalize and readings:
        px, py = fit_params(xs), fit_params(ys)
        xs = [min_max_normalize(v, px) for v in xs]
        ys = [min_max_normalize(v, py) for v in ys]
    return [(x, y, t, t is p) for x, y, t, p in zip(xs, ys, truth, predicted)]


def normalization_summary(readings: Sequence[SensorReading]) -> dict[str, NormalizationParams]:
    if not readings:
        return {}
    return {name: fit_params([getattr(r, name) for r in readings]) for name in READING_FIELDS}
