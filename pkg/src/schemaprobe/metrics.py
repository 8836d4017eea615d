"""Precision/recall/F1 for predicted links against gold alignments.

Edges are compared as untyped (question, item) pairs; every 0/0 ratio is
defined as 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .datamodel import LinkGraph
from .errors import ValidationError


@dataclass(frozen=True)
class LinkMetrics:
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "LinkMetrics":
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(tp, fp, fn, precision, recall, f1)


def score_pairs(
    pred: Iterable[tuple[int, int]], gold: Iterable[tuple[int, int]]
) -> LinkMetrics:
    pred_set = {(int(q), int(s)) for q, s in pred}
    gold_set = {(int(q), int(s)) for q, s in gold}
    tp = len(pred_set & gold_set)
    return LinkMetrics.from_counts(tp, len(pred_set) - tp, len(gold_set) - tp)


def score_links(pred: LinkGraph, gold: Iterable[tuple[int, int]]) -> LinkMetrics:
    """Compare a predicted graph's untyped pairs against gold pairs."""
    gold_set = {(int(q), int(s)) for q, s in gold}
    for q, s in gold_set:
        if not 0 <= q < pred.n_question or not 0 <= s < pred.n_schema:
            raise ValidationError(
                f"gold link ({q}, {s}) out of range for predicted graph "
                f"{pred.n_question} x {pred.n_schema}"
            )
    return score_pairs(pred.pairs(), gold_set)


def combine(metrics: Iterable[LinkMetrics]) -> LinkMetrics:
    """Micro-average: sum the counts, then re-derive the ratios."""
    tp = fp = fn = 0
    for m in metrics:
        tp += m.true_positives
        fp += m.false_positives
        fn += m.false_negatives
    return LinkMetrics.from_counts(tp, fp, fn)
