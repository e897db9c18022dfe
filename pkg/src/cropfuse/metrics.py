"""Pixel accuracy, F1 and IoU for binary masks, with dataset aggregation.

Degenerate case: when prediction and ground truth have no positive pixels,
F1 and IoU are 1 (perfect agreement).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyDataset
from .imagecore import BinaryMask


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn
        )


def confusion(pred: BinaryMask, gt: BinaryMask) -> ConfusionCounts:
    if pred.shape != gt.shape:
        raise DimensionMismatch(f"prediction {pred.shape} vs ground truth {gt.shape}")
    p, g = pred.values, gt.values
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    return ConfusionCounts(tp, fp, p.size - tp - fp - fn, fn)


def accuracy(c: ConfusionCounts) -> float:
    if c.total == 0:
        raise ValueError("accuracy of an empty comparison")
    return (c.tp + c.tn) / c.total


def f1(c: ConfusionCounts) -> float:
    denom = 2 * c.tp + c.fp + c.fn
    return 1.0 if denom == 0 else 2 * c.tp / denom


def iou_from_counts(c: ConfusionCounts) -> float:
    union = c.tp + c.fp + c.fn
    return 1.0 if union == 0 else c.tp / union


def iou(pred: BinaryMask, gt: BinaryMask) -> float:
    return iou_from_counts(confusion(pred, gt))


@dataclass(frozen=True)
class MetricsReport:
    acc: float
    f1: float
    iou: float
    counts: ConfusionCounts
    aggregation: str = "image"

    @classmethod
    def from_counts(cls, c: ConfusionCounts, aggregation: str = "image") -> "MetricsReport":
        return cls(accuracy(c), f1(c), iou_from_counts(c), c, aggregation)


def evaluate(pred: BinaryMask, gt: BinaryMask) -> MetricsReport:
    return MetricsReport.from_counts(confusion(pred, gt))


def aggregate(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Per-image (macro) mean of acc/F1/IoU; counts are summed for reference."""
    if not reports:
        raise EmptyDataset("cannot aggregate an empty list of reports")
    if len(reports) == 1:
        return reports[0]
    counts = reports[0].counts
    for r in reports[1:]:
        counts = counts + r.counts
    n = len(reports)
    return MetricsReport(
        float(sum(r.acc for r in reports) / n),
        float(sum(r.f1 for r in reports) / n),
        float(sum(r.iou for r in reports) / n),
        counts,
        "macro",
    )


def aggregate_micro(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Metrics of the pooled confusion counts."""
    if not reports:
        raise EmptyDataset("cannot aggregate an empty list of reports")
    counts = reports[0].counts
    for r in reports[1:]:
        counts = counts + r.counts
    return MetricsReport.from_counts(counts, "micro")
