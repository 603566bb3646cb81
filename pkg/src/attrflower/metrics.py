"""Confusion outcomes and evaluation metrics for multi-attribute predictions.

Every (record, attribute) pair classifies into exactly one of TP/TN/FP/FN at
a prediction cut-off (0.5 by convention, inclusive: prd >= threshold counts
as a positive prediction). Counts aggregate micro-style over the cross
product of records and a set of attribute indices. On top of the counts sit
accuracy, precision, recall and F1; ranking quality is measured by
non-interpolated average precision and its per-attribute mean (mAP).

Metrics whose denominator is zero are Undefined, represented as ``None``
(serialized to JSON ``null``) rather than raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .dataset import Dataset, ImageRecord
from .errors import ArgumentError


class Outcome(Enum):
    TP = "TP"
    TN = "TN"
    FP = "FP"
    FN = "FN"


class DistanceKind(Enum):
    EUCLIDEAN = "euclidean"
    COSINE = "cosine"


@dataclass(frozen=True)
class ConfusionSummary:
    """TP/TN/FP/FN counts over some set of (record, attribute) pairs."""

    tp: int
    tn: int
    fp: int
    fn: int
    threshold: float

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def to_json(self) -> dict:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn,
                "threshold": self.threshold}


@dataclass(frozen=True)
class MetricsReport:
    """Accuracy/precision/recall/F1; ``None`` marks an undefined metric."""

    accuracy: float | None
    precision: float | None
    recall: float | None
    f1: float | None

    def to_json(self) -> dict:
        return {"accuracy": self.accuracy, "precision": self.precision,
                "recall": self.recall, "f1": self.f1}


def _check_threshold(threshold: float) -> None:
    if not (0.0 <= threshold <= 1.0):
        raise ArgumentError(f"threshold must be in [0, 1], got {threshold}")


def classify_outcome(act: int, prd: float, threshold: float = 0.5) -> Outcome:
    """Confusion outcome of one (actual, predicted) attribute pair.

    A prediction exactly equal to the threshold counts as positive.
    """
    if act not in (0, 1):
        raise ArgumentError(f"act must be 0 or 1, got {act}")
    if not (0.0 <= prd <= 1.0):
        raise ArgumentError(f"prd must be in [0, 1], got {prd}")
    _check_threshold(threshold)
    positive = prd >= threshold
    if act == 1:
        return Outcome.TP if positive else Outcome.FN
    return Outcome.FP if positive else Outcome.TN


def outcome_grid(act: np.ndarray, prd: np.ndarray,
                 threshold: float = 0.5) -> np.ndarray:
    """Vectorized outcomes for an (n, k) pair of ACT/PRD matrices.

    Returns an (n, k) object array of Outcome values; the scalar rule is
    exactly ``classify_outcome``.
    """
    act = np.asarray(act)
    prd = np.asarray(prd)
    if act.shape != prd.shape:
        raise ArgumentError(f"shape mismatch: act {act.shape}, prd {prd.shape}")
    _check_threshold(threshold)
    positive = prd >= threshold
    actual = act == 1
    out = np.empty(act.shape, dtype=object)
    out[actual & positive] = Outcome.TP
    out[actual & ~positive] = Outcome.FN
    out[~actual & positive] = Outcome.FP
    out[~actual & ~positive] = Outcome.TN
    return out


def _resolve_indices(attribute_indices: Iterable[int] | None,
                     k: int) -> np.ndarray:
    if attribute_indices is None:
        return np.arange(k)
    idx = np.asarray(sorted(set(int(i) for i in attribute_indices)), dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= k):
        raise ArgumentError(f"attribute index out of range for k={k}: {idx.tolist()}")
    return idx


def confusion(records: Sequence[ImageRecord],
              attribute_indices: Iterable[int] | None = None,
              threshold: float = 0.5) -> ConfusionSummary:
    """Micro-aggregated confusion counts over records x attribute indices.

    ``attribute_indices=None`` means all attributes. Counts always total
    ``len(records) * len(indices)``.
    """
    _check_threshold(threshold)
    records = list(records)
    if not records:
        return ConfusionSummary(0, 0, 0, 0, threshold)
    k = records[0].act.shape[0]
    idx = _resolve_indices(attribute_indices, k)
    act = np.stack([r.act for r in records])[:, idx]
    prd = np.stack([r.prd for r in records])[:, idx]
    positive = prd >= threshold
    actual = act == 1
    tp = int(np.count_nonzero(actual & positive))
    fn = int(np.count_nonzero(actual & ~positive))
    fp = int(np.count_nonzero(~actual & positive))
    tn = int(np.count_nonzero(~actual & ~positive))
    return ConfusionSummary(tp=tp, tn=tn, fp=fp, fn=fn, threshold=threshold)


def report(c: ConfusionSummary) -> MetricsReport:
    """Accuracy, precision, recall and F1 from confusion counts.

    accuracy  = (TP + TN) / (TP + TN + FP + FN)
    precision = TP / (TP + FP)
    recall    = TP / (TP + FN)
    F1        = 2 * precision * recall / (precision + recall)

    A metric with a zero denominator is None; F1 is None when either
    constituent is None or precision + recall == 0.
    """
    accuracy = (c.tp + c.tn) / c.total if c.total > 0 else None
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) > 0 else None
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else None
    f1 = None
    if precision is not None and recall is not None and (precision + recall) > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    return MetricsReport(accuracy=accuracy, precision=precision,
                         recall=recall, f1=f1)


def error_distance(act: np.ndarray, prd: np.ndarray,
                   kind: DistanceKind = DistanceKind.EUCLIDEAN) -> float:
    """Distance between an ACT vector and a PRD vector.

    Euclidean is the L2 norm of (act - prd). Cosine is 1 - cos similarity,
    with the degenerate convention: 0 when both vectors are zero, 1 when
    exactly one is zero.
    """
    act = np.asarray(act, dtype=np.float64)
    prd = np.asarray(prd, dtype=np.float64)
    if act.shape != prd.shape:
        raise ArgumentError(f"length mismatch: act {act.shape}, prd {prd.shape}")
    kind = DistanceKind(kind)
    if kind is DistanceKind.EUCLIDEAN:
        return float(np.linalg.norm(act - prd))
    na = float(np.linalg.norm(act))
    nb = float(np.linalg.norm(prd))
    if na == 0.0 and nb == 0.0:
        return 0.0
    if na == 0.0 or nb == 0.0:
        return 1.0
    return float(1.0 - float(act @ prd) / (na * nb))


def average_precision(scores: Sequence[float],
                      labels: Sequence[int]) -> float | None:
    """Non-interpolated AP: mean of precision@k over positive ranks k.

    Scores sort descending with ties broken by original index ascending.
    Returns None when there are no positives.
    """
    scores = list(scores)
    labels = list(labels)
    if len(scores) != len(labels):
        raise ArgumentError(
            f"length mismatch: {len(scores)} scores, {len(labels)} labels")
    if any(l not in (0, 1) for l in labels):
        raise ArgumentError("labels must be 0 or 1")
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    hits = 0
    precision_sum = 0.0
    for rank, i in enumerate(order, start=1):
        if labels[i] == 1:
            hits += 1
            precision_sum += hits / rank
    if hits == 0:
        return None
    return precision_sum / hits


def mean_average_precision(dataset: Dataset) -> float | None:
    """Mean per-attribute AP over attributes with at least one positive.

    None when no attribute has a positive label.
    """
    if not dataset.records:
        return None
    act = dataset.act_matrix(dtype=int)
    prd = dataset.prd_matrix()
    aps = []
    for j in range(dataset.schema.k):
        ap = average_precision(prd[:, j].tolist(), act[:, j].tolist())
        if ap is not None:
            aps.append(ap)
    if not aps:
        return None
    return float(np.mean(aps))


def per_attribute_confusion(dataset: Dataset, attribute_index: int,
                            threshold: float = 0.5) -> ConfusionSummary:
    """Confusion counts for a single attribute over the whole dataset."""
    return confusion(dataset.records, [attribute_index], threshold)
