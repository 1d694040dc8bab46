"""Forward-evaluable training-signal functions.

These are the view-synthesis and distillation objectives as checkable
forward computations: differentiable warping, SSIM + L1 photometric error,
edge-aware smoothness on mean-normalized inverse depth, per-pixel minimum
with automasking, the multi-scale gradient-matching term, and the combined
distillation loss. No optimizer or autodiff lives here; correctness is
pinned by finite-difference checks against hand-written adjoints in the
test suite — which is also why everything here computes and returns
float64 (a 1e-3 probe step would drown in float32 rounding).

Inverse-depth maps passed to the distillation losses are expected in
[0, 1] (relative inverse depth, the sigmoid range).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, ShapeError
from .tensor_ops import as_nchw, bilinear_sample, upsample_bilinear

__all__ = [
    "CameraIntrinsics",
    "RelativePose",
    "warp_grid",
    "warp",
    "box_mean3",
    "ssim",
    "photometric_error",
    "smoothness_loss",
    "per_pixel_min_with_automask",
    "avg_pool",
    "gradient_loss",
    "distill_loss",
]

SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2


def _as4_f64(x, name):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4:
        raise ShapeError(f"{name} must be rank 4 (n, c, h, w), got shape {x.shape}")
    if min(x.shape) < 1:
        raise ShapeError(f"{name} has a zero-sized axis: {x.shape}")
    return x


def _dx(x):
    d = np.zeros_like(x)
    d[:, :, :, :-1] = x[:, :, :, 1:] - x[:, :, :, :-1]
    return d


def _dy(x):
    d = np.zeros_like(x)
    d[:, :, :-1, :] = x[:, :, 1:, :] - x[:, :, :-1, :]
    return d


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise DomainError(f"focal lengths must be positive, got {self.fx}, {self.fy}")

    def matrix(self):
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]],
            dtype=np.float64,
        )


@dataclass(frozen=True)
class RelativePose:
    """Rigid transform taking reference-camera points into the source camera."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if not np.allclose(r.T @ r, np.eye(3), atol=1e-6):
            raise DomainError("rotation is not orthonormal within 1e-6")
        if not np.isclose(np.linalg.det(r), 1.0, atol=1e-6):
            raise DomainError("rotation determinant is not +1 within 1e-6")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))


def warp_grid(K_src: CameraIntrinsics, pose: RelativePose, K_ref: CameraIntrinsics, depth):
    """Per-pixel source coordinates for view synthesis.

    Each reference pixel is back-projected with its metric depth and K_ref,
    moved by (R, T), and projected with K_src. Returns an (h, w, 2) grid of
    (x, y) pixel coordinates in the source image.
    """
    depth = np.asarray(depth, dtype=np.float64)
    if depth.ndim != 2:
        raise ShapeError(f"depth must be (h, w), got {depth.shape}")
    if np.any(depth <= 0):
        raise DomainError("depth must be positive everywhere")
    h, w = depth.shape
    u, v = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    rays = np.linalg.inv(K_ref.matrix()) @ np.stack(
        [u.ravel(), v.ravel(), np.ones(h * w)]
    )
    pts = rays * depth.ravel()
    pts = pose.rotation @ pts + pose.translation[:, None]
    proj = K_src.matrix() @ pts
    z = proj[2]
    grid = np.stack([proj[0] / z, proj[1] / z], axis=-1).reshape(h, w, 2)
    return grid.astype(np.float32)


def warp(source, K_src: CameraIntrinsics, pose: RelativePose, K_ref: CameraIntrinsics, depth):
    """Synthesize the reference view by sampling source at the warped grid."""
    source = as_nchw(source, "source")
    grid = warp_grid(K_src, pose, K_ref, depth)
    if grid.shape[:2] != source.shape[2:]:
        raise ShapeError(
            f"depth dims {grid.shape[:2]} do not match source {source.shape}"
        )
    return bilinear_sample(source, grid[None])


def box_mean3(x):
    """3x3 mean with edge replication; same dims and dtype as the input."""
    xp = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)), mode="edge")
    out = np.zeros_like(x)
    h, w = x.shape[2:]
    for di in range(3):
        for dj in range(3):
            out += xp[:, :, di : di + h, dj : dj + w]
    return out / 9.0


def _ssim64(a, b):
    mu_a = box_mean3(a)
    mu_b = box_mean3(b)
    var_a = box_mean3(a * a) - mu_a * mu_a
    var_b = box_mean3(b * b) - mu_b * mu_b
    cov = box_mean3(a * b) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + SSIM_C1) * (2.0 * cov + SSIM_C2)
    den = (mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return num / den


def ssim(a, b):
    """Per-pixel structural similarity with 3x3 mean pooling.

    Values lie in [-1, 1] up to float rounding; ssim(x, x) is 1 everywhere.
    """
    a = _as4_f64(a, "a")
    b = _as4_f64(b, "b")
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    return _ssim64(a, b)


def photometric_error(I, I_hat, alpha=0.85):
    """Mixed SSIM + L1 reconstruction penalty, per pixel.

    alpha * (1 - SSIM)/2 + (1 - alpha) * |I - I_hat|, both terms averaged
    over channels. Returns an (n, 1, h, w) non-negative map.
    """
    a = _as4_f64(I, "I")
    b = _as4_f64(I_hat, "I_hat")
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError(f"alpha must be in [0, 1], got {alpha}")
    s = _ssim64(a, b).mean(axis=1, keepdims=True)
    l1 = np.abs(a - b).mean(axis=1, keepdims=True)
    return alpha * (1.0 - s) / 2.0 + (1.0 - alpha) * l1


def smoothness_loss(depth, image):
    """Edge-aware first-order penalty on mean-normalized inverse depth.

    depth: (n, 1, h, w) inverse-depth map, positive; image: (n, c, h, w).
    Depth gradients are weighted by exp(-|image gradient|) with the image
    gradient magnitude averaged over channels. Invariant to scaling depth.
    """
    depth = _as4_f64(depth, "depth")
    image = _as4_f64(image, "image")
    if depth.shape[2:] != image.shape[2:] or depth.shape[0] != image.shape[0]:
        raise ShapeError(f"spatial mismatch {depth.shape} vs {image.shape}")
    if depth.shape[2] < 2 or depth.shape[3] < 2:
        raise ShapeError(f"need at least 2x2 spatial extent, got {depth.shape}")
    mean = depth.mean()
    if mean == 0.0:
        raise DomainError("mean normalization undefined for all-zero depth")
    d_star = depth / mean
    wx = np.exp(-np.abs(_dx(image)).mean(axis=1, keepdims=True))
    wy = np.exp(-np.abs(_dy(image)).mean(axis=1, keepdims=True))
    return float((np.abs(_dx(d_star)) * wx + np.abs(_dy(d_star)) * wy).mean())


def per_pixel_min_with_automask(pe_warped, pe_identity):
    """Minimum reprojection error over source views, plus the static-pixel mask.

    pe_min is the elementwise minimum over pe_warped; the mask is 1 where
    that minimum beats the best identity (unwarped) error — pixels that do
    not change between frames fail the test and are masked out.
    """
    if not pe_warped or not pe_identity:
        raise ConfigurationError("need at least one warped and one identity map")
    warped = [as_nchw(m, "pe_warped") for m in pe_warped]
    ident = [as_nchw(m, "pe_identity") for m in pe_identity]
    shape = warped[0].shape
    for m in warped + ident:
        if m.shape != shape:
            raise ShapeError(f"map shape {m.shape} differs from {shape}")
    pe_min = np.minimum.reduce(warped)
    id_min = np.minimum.reduce(ident)
    mask = (pe_min < id_min).astype(np.float32)
    return pe_min, mask


def avg_pool(x, block):
    """Non-overlapping block mean; spatial dims must divide by block."""
    x = np.asarray(x)
    n, c, h, w = x.shape
    if block == 1:
        return x.copy()
    if h % block or w % block:
        raise ConfigurationError(f"dims {h}x{w} not divisible by block {block}")
    return x.reshape(n, c, h // block, block, w // block, block).mean(axis=(3, 5))


def gradient_loss(pred, proxy, scales=4):
    """Multi-scale gradient matching on the inverse-depth residual.

    residual = pred - proxy; at each scale k the residual is average-pooled
    by 2^k and the mean |dx| + |dy| accumulated. Zero iff the residual is
    constant at every scale.
    """
    pred = _as4_f64(pred, "pred")
    proxy = _as4_f64(proxy, "proxy")
    if pred.shape != proxy.shape:
        raise ShapeError(f"shape mismatch {pred.shape} vs {proxy.shape}")
    if scales < 1:
        raise ConfigurationError(f"scales must be >= 1, got {scales}")
    h, w = pred.shape[2:]
    div = 2 ** (scales - 1)
    if h % div or w % div:
        raise ConfigurationError(
            f"dims {h}x{w} not divisible by 2^(scales-1) = {div}"
        )
    r = pred - proxy
    total = 0.0
    for k in range(scales):
        rk = avg_pool(r, 2**k)
        total += float((np.abs(_dx(rk)) + np.abs(_dy(rk))).mean())
    return total


def distill_loss(preds, proxy, alpha_l=1.0, alpha_s0=0.5, grad_scales=4):
    """Proxy-supervised loss over prediction scales, finest first.

    Each prediction is bilinearly upsampled here to the proxy resolution
    (its dims must divide the proxy's evenly). Per scale s:
    alpha_l * mean|D_s - proxy| + (alpha_s0 / 2^s) * gradient_loss(D_s, proxy);
    the gradient weight halves at each lower scale while alpha_l stays fixed.
    """
    if not preds:
        raise ConfigurationError("need at least one prediction scale")
    proxy = _as4_f64(proxy, "proxy")
    ph, pw = proxy.shape[2:]
    total = 0.0
    for s, pred in enumerate(preds):
        pred = _as4_f64(pred, f"preds[{s}]")
        h, w = pred.shape[2:]
        if ph % h or pw % w or ph // h != pw // w:
            raise ConfigurationError(
                f"prediction {h}x{w} is not an integer downscale of proxy {ph}x{pw}"
            )
        factor = ph // h
        up = pred if factor == 1 else upsample_bilinear(pred, factor).astype(np.float64)
        total += alpha_l * float(np.abs(up - proxy).mean())
        total += (alpha_s0 / 2**s) * gradient_loss(up, proxy, scales=grad_scales)
    return total
