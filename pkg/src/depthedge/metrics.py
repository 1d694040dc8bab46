"""Seven-column depth evaluation and the alignment steps for scale-free
predictions.

compute_metrics follows the standard protocol: predictions are clamped to
[1e-3, cap] and ground truth to (0, cap] before scoring. Two alignments are
provided: median scaling in depth space, and least-squares scale-and-shift
in inverse-depth space (the convention for affine-invariant students).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, DomainError, ShapeError

__all__ = [
    "MetricsReport",
    "compute_metrics",
    "median_align",
    "lsq_align_inverse",
    "PRED_FLOOR",
]

PRED_FLOOR = 1e-3


@dataclass(frozen=True)
class MetricsReport:
    abs_rel: float
    sq_rel: float
    rmse: float
    rmse_log: float
    a1: float
    a2: float
    a3: float

    CSV_HEADER = "abs_rel,sq_rel,rmse,rmse_log,a1,a2,a3"

    def as_tuple(self):
        return (
            self.abs_rel,
            self.sq_rel,
            self.rmse,
            self.rmse_log,
            self.a1,
            self.a2,
            self.a3,
        )

    def csv_row(self):
        return ",".join(f"{v:.6f}" for v in self.as_tuple())


def _flat_valid(pred, gt, mask):
    pred = np.asarray(pred, dtype=np.float64).ravel()
    gt = np.asarray(gt, dtype=np.float64).ravel()
    if pred.shape != gt.shape:
        raise ShapeError(f"pred {pred.shape} and gt {gt.shape} differ")
    if mask is None:
        m = np.ones_like(gt, dtype=bool)
    else:
        m = np.asarray(mask, dtype=bool).ravel()
        if m.shape != gt.shape:
            raise ShapeError(f"mask {m.shape} does not match {gt.shape}")
    if not m.any():
        raise DomainError("no valid pixels under the mask")
    return pred[m], gt[m]


def compute_metrics(pred_depth, gt_depth, valid_mask=None, cap=80.0) -> MetricsReport:
    """Abs Rel, Sq Rel, RMSE, log RMSE, and the three delta fractions."""
    p, g = _flat_valid(pred_depth, gt_depth, valid_mask)
    if np.any(g <= 0) or np.any(p <= 0):
        raise DomainError("depths must be positive on valid pixels")
    g = np.minimum(g, cap)
    p = np.clip(p, PRED_FLOOR, cap)
    err = p - g
    ratio = np.maximum(p / g, g / p)
    return MetricsReport(
        abs_rel=float(np.mean(np.abs(err) / g)),
        sq_rel=float(np.mean(err**2 / g)),
        rmse=float(np.sqrt(np.mean(err**2))),
        rmse_log=float(np.sqrt(np.mean((np.log(p) - np.log(g)) ** 2))),
        a1=float(np.mean(ratio < 1.25)),
        a2=float(np.mean(ratio < 1.25**2)),
        a3=float(np.mean(ratio < 1.25**3)),
    )


def median_align(pred, gt, valid_mask=None):
    """Scale pred by median(gt)/median(pred) over valid pixels."""
    p, g = _flat_valid(pred, gt, valid_mask)
    if np.any(p <= 0) or np.any(g <= 0):
        raise DomainError("median alignment needs positive values")
    mp = np.median(p)
    if mp == 0:
        raise DegeneracyError("median of pred is zero")
    scale = np.median(g) / mp
    return np.asarray(pred, dtype=np.float64) * scale


def lsq_align_inverse(pred_inv, gt_depth, valid_mask=None):
    """Least-squares (scale, shift) fitting s*pred_inv + b to 1/gt_depth.

    Closed-form 2x2 normal equations over the valid pixels; raises on a
    constant prediction (rank-deficient system).
    """
    d, g = _flat_valid(pred_inv, gt_depth, valid_mask)
    if np.any(g <= 0):
        raise DomainError("gt depth must be positive on valid pixels")
    y = 1.0 / g
    n = d.size
    sd, sdd, sy, sdy = d.sum(), (d * d).sum(), y.sum(), (d * y).sum()
    det = sdd * n - sd * sd
    if n < 2 or det <= 1e-12 * max(sdd * n, 1.0):
        raise DegeneracyError("prediction is constant; scale/shift fit is degenerate")
    s = (n * sdy - sd * sy) / det
    b = (sdd * sy - sd * sdy) / det
    return float(s), float(b)
