"""Confusion-matrix metrics, regression summaries, and reported-table checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AirholdError

__all__ = [
    "MetricsReport",
    "classification_metrics",
    "regression_metrics",
    "table_consistency",
]


@dataclass
class MetricsReport:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    accuracy: float = 0.0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    # zero-denominator metrics are reported as 0.0 and flagged here
    undefined: list[str] = field(default_factory=list)
    mse: float | None = None
    mae: float | None = None
    bin_edges: list[float] | None = None
    pred_hist: list[int] | None = None
    actual_hist: list[int] | None = None

    def as_dict(self) -> dict:
        out = {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "undefined": list(self.undefined),
        }
        if self.mse is not None:
            out.update(
                mse=self.mse,
                mae=self.mae,
                bin_edges=self.bin_edges,
                pred_hist=self.pred_hist,
                actual_hist=self.actual_hist,
            )
        return out


def classification_metrics(
    y_true, y_prob, threshold: float = 0.5
) -> MetricsReport:
    """Thresholded confusion-matrix metrics; 0-denominator cases report 0."""
    yt = np.asarray(y_true, dtype=bool)
    yp = np.asarray(y_prob, dtype=float)
    if yt.shape != yp.shape:
        raise AirholdError(f"length mismatch: {yt.shape} vs {yp.shape}")
    if yp.size and (yp.min() < 0.0 or yp.max() > 1.0):
        raise AirholdError("probabilities outside [0, 1]")
    pred = yp >= threshold
    tp = int(np.sum(pred & yt))
    fp = int(np.sum(pred & ~yt))
    tn = int(np.sum(~pred & ~yt))
    fn = int(np.sum(~pred & yt))
    n = tp + fp + tn + fn
    rep = MetricsReport(tp=tp, fp=fp, tn=tn, fn=fn)
    rep.accuracy = (tp + tn) / n if n else 0.0

    if tp + fp > 0:
        rep.precision = tp / (tp + fp)
    else:
        rep.undefined.append("precision")
    if tp + fn > 0:
        rep.recall = tp / (tp + fn)
    else:
        rep.undefined.append("recall")
    if rep.precision + rep.recall > 0:
        rep.f1 = 2 * rep.precision * rep.recall / (rep.precision + rep.recall)
    else:
        rep.undefined.append("f1")
    return rep


def regression_metrics(y_true, y_pred, bins: int = 50) -> MetricsReport:
    """MSE/MAE plus aligned histograms of predicted vs actual values."""
    yt = np.asarray(y_true, dtype=float)
    yp = np.asarray(y_pred, dtype=float)
    if yt.shape != yp.shape:
        raise AirholdError(f"length mismatch: {yt.shape} vs {yp.shape}")
    if yt.size and yt.min() < 0:
        raise AirholdError("regression targets must be nonnegative")
    err = yp - yt
    rep = MetricsReport()
    rep.mse = float(np.mean(err**2)) if yt.size else 0.0
    rep.mae = float(np.mean(np.abs(err))) if yt.size else 0.0
    hi = float(max(yt.max(), yp.max())) if yt.size else 1.0
    lo = float(min(0.0, yt.min() if not yt.size else min(yt.min(), yp.min())))
    if hi <= lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    rep.bin_edges = [float(e) for e in edges]
    rep.pred_hist = [int(c) for c in np.histogram(yp, bins=edges)[0]]
    rep.actual_hist = [int(c) for c in np.histogram(yt, bins=edges)[0]]
    return rep


def table_consistency(
    rows: list[tuple[float, float, float, float]], tolerance: float = 0.015
) -> list[bool]:
    """Check reported (accuracy, P, R, F1) rows: F1 must match 2PR/(P+R).

    The tolerance absorbs the worst case of P and R themselves being
    two-decimal roundings, not any model behavior.
    """
    results = []
    for _acc, p, r, f1 in rows:
        recomputed = 2 * p * r / (p + r) if p + r > 0 else 0.0
        results.append(abs(recomputed - f1) <= tolerance)
    return results
