"""Metric-scale recovery from sparse anchors, and the AR occlusion mask.

A monocular network's relative inverse depth d is mapped to metric inverse
depth by s*d (+ b). The fit runs in inverse-depth space — linear in the
network's native output — with a relative inlier threshold so anchors
spanning very different depths are weighted sensibly, and finishes with a
least-squares refit on the consensus set.

Randomness comes from an in-module SplitMix64 so a fixed seed reproduces
the exact sample sequence on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegeneracyError, DomainError, ShapeError

__all__ = [
    "SparseAnchor",
    "ScaleModel",
    "SplitMix64",
    "load_anchors",
    "ransac_scale",
    "metricize",
    "occlusion_mask",
]


@dataclass(frozen=True)
class SparseAnchor:
    """A pixel with known metric depth, e.g. from an AR tracking framework."""

    u: int
    v: int
    z: float

    def __post_init__(self):
        if self.z <= 0:
            raise DomainError(f"anchor depth must be positive, got {self.z}")


@dataclass(frozen=True)
class ScaleModel:
    scale: float
    shift: float
    inlier_count: int
    inlier_ratio: float


class SplitMix64:
    """SplitMix64 PRNG (Steele et al. constants); deterministic everywhere."""

    MASK = (1 << 64) - 1

    def __init__(self, seed):
        self.state = seed & self.MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, n):
        return self.next_u64() % n


def load_anchors(path):
    """Read `u,v,z` CSV lines; `#`-prefixed lines are comments."""
    anchors = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ConfigurationError(
                    f"{path}:{lineno}: expected 'u,v,z', got {line!r}"
                )
            try:
                u, v = int(parts[0]), int(parts[1])
                z = float(parts[2])
            except ValueError as e:
                raise ConfigurationError(f"{path}:{lineno}: {e}") from e
            anchors.append(SparseAnchor(u=u, v=v, z=z))
    return anchors


def _anchor_samples(pred_inv, anchors):
    h, w = pred_inv.shape
    d = np.empty(len(anchors))
    y = np.empty(len(anchors))
    for i, a in enumerate(anchors):
        if not (0 <= a.u < w and 0 <= a.v < h):
            raise DomainError(f"anchor ({a.u}, {a.v}) outside {w}x{h} image")
        d[i] = pred_inv[a.v, a.u]
        y[i] = 1.0 / a.z
    return d, y


def _refit(d, y, mode):
    if mode == "scale_only":
        denom = float(d @ d)
        if denom <= 0:
            raise DegeneracyError("inlier predictions are all zero")
        return float(d @ y) / denom, 0.0
    n = d.size
    sd, sdd, sy, sdy = d.sum(), (d * d).sum(), y.sum(), (d * y).sum()
    det = sdd * n - sd * sd
    if det <= 1e-12 * max(sdd * n, 1.0):
        raise DegeneracyError("inlier predictions are constant")
    return float((n * sdy - sd * sy) / det), float((sdd * sy - sd * sdy) / det)


def ransac_scale(
    pred_inv,
    anchors,
    iterations=100,
    inlier_tol=0.05,
    mode="scale_only",
    seed=0,
) -> ScaleModel:
    """Robust (scale[, shift]) fit of relative inverse depth to anchors.

    Per iteration a minimal anchor set is sampled, a candidate fitted, and
    anchors within |s*d + b - 1/z| <= inlier_tol * (1/z) counted; the most
    consensual candidate wins (first one on ties) and is refit by least
    squares on its inliers. Deterministic for a fixed seed.
    """
    if mode not in ("scale_only", "scale_shift"):
        raise ConfigurationError(f"mode must be scale_only or scale_shift, got {mode!r}")
    pred_inv = np.asarray(pred_inv, dtype=np.float64)
    if pred_inv.ndim != 2:
        raise ShapeError(f"pred_inv must be (h, w), got {pred_inv.shape}")
    minimal = 1 if mode == "scale_only" else 2
    if len(anchors) < minimal:
        raise ConfigurationError(
            f"need at least {minimal} anchor(s) for {mode}, got {len(anchors)}"
        )
    if iterations < 1:
        raise ConfigurationError(f"iterations must be >= 1, got {iterations}")
    d, y = _anchor_samples(pred_inv, anchors)
    n = d.size

    rng = SplitMix64(seed)
    best_count = -1
    best_inliers = None
    for _ in range(iterations):
        if mode == "scale_only":
            i = rng.below(n)
            if d[i] <= 0:
                continue
            s, b = y[i] / d[i], 0.0
        else:
            i = rng.below(n)
            j = rng.below(n)
            if i == j or d[i] == d[j]:
                continue
            s = (y[i] - y[j]) / (d[i] - d[j])
            b = y[i] - s * d[i]
        if s <= 0:
            continue
        inliers = np.abs(s * d + b - y) <= inlier_tol * y
        count = int(inliers.sum())
        if count > best_count:
            best_count = count
            best_inliers = inliers

    if best_inliers is None or best_count < minimal:
        raise DegeneracyError("no valid candidate model (all sampled scales non-positive)")

    scale, shift = _refit(d[best_inliers], y[best_inliers], mode)
    if scale <= 0:
        raise DegeneracyError(f"refit produced non-positive scale {scale}")
    return ScaleModel(
        scale=scale,
        shift=shift,
        inlier_count=best_count,
        inlier_ratio=best_count / n,
    )


def metricize(pred_inv, model: ScaleModel):
    """Metric depth 1/(s*d + b) plus a validity mask.

    Pixels where s*d + b <= 0 are flagged invalid (NaN in the depth map),
    never clamped.
    """
    d = np.asarray(pred_inv, dtype=np.float64)
    metric_inv = model.scale * d + model.shift
    valid = metric_inv > 0
    depth = np.full(d.shape, np.nan, dtype=np.float64)
    depth[valid] = 1.0 / metric_inv[valid]
    return depth.astype(np.float32), valid


def occlusion_mask(real_depth, virtual_depth):
    """1 where the virtual surface should be drawn: it is nearer than the
    real one, or the real depth is invalid (NaN). Use +inf where no virtual
    content exists."""
    real = np.asarray(real_depth, dtype=np.float64)
    virt = np.asarray(virtual_depth, dtype=np.float64)
    if real.shape != virt.shape:
        raise ShapeError(f"dims differ: {real.shape} vs {virt.shape}")
    invalid = ~np.isfinite(real)
    return ((virt < real) | invalid).astype(np.uint8)
