"""Micro and Macro F1 for multi-label predictions.

Thresholded at >= threshold. A label (or the whole pool) with zero precision
plus recall gets F1 = 0; that convention is asserted by tests, not silently
assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class PredictionSet:
    """Probabilities and ground truth for a batch of documents.

    probabilities: (documents, labels) floats in [0, 1].
    truth: same shape, 0/1.
    """

    probabilities: np.ndarray
    truth: np.ndarray
    threshold: float = 0.5

    def __post_init__(self):
        self.probabilities = np.atleast_2d(np.asarray(self.probabilities, dtype=np.float64))
        self.truth = np.atleast_2d(np.asarray(self.truth, dtype=np.int64))
        if self.probabilities.shape != self.truth.shape:
            raise ValueError(
                f"shape mismatch: probabilities {self.probabilities.shape}, "
                f"truth {self.truth.shape}"
            )
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("threshold must lie strictly between 0 and 1")
        if ((self.probabilities < 0) | (self.probabilities > 1)).any():
            raise ValueError("probabilities must lie in [0, 1]")
        if ((self.truth != 0) & (self.truth != 1)).any():
            raise ValueError("truth must be a 0/1 bitmask")

    @property
    def decisions(self) -> np.ndarray:
        return (self.probabilities >= self.threshold).astype(np.int64)


def _f1(tp: int, fp: int, fn: int) -> float:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _require_documents(ps: PredictionSet) -> None:
    if ps.probabilities.shape[0] == 0:
        raise ValueError("need at least one document")
    if ps.probabilities.shape[1] == 0:
        raise ValueError("need at least one label")


def micro_f1(ps: PredictionSet) -> float:
    """F1 over true/false positives pooled across every (document, label) pair."""
    _require_documents(ps)
    pred = ps.decisions
    tp = int(((pred == 1) & (ps.truth == 1)).sum())
    fp = int(((pred == 1) & (ps.truth == 0)).sum())
    fn = int(((pred == 0) & (ps.truth == 1)).sum())
    return _f1(tp, fp, fn)


def macro_f1(ps: PredictionSet) -> float:
    """Per-label F1 averaged uniformly over all labels."""
    _require_documents(ps)
    pred = ps.decisions
    scores = []
    for j in range(ps.truth.shape[1]):
        tp = int(((pred[:, j] == 1) & (ps.truth[:, j] == 1)).sum())
        fp = int(((pred[:, j] == 1) & (ps.truth[:, j] == 0)).sum())
        fn = int(((pred[:, j] == 0) & (ps.truth[:, j] == 1)).sum())
        scores.append(_f1(tp, fp, fn))
    return float(np.mean(scores))
