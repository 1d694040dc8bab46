"""Dense float32 kernels on (n, c, h, w) arrays.

Everything downstream (graph execution, losses, bokeh) is built on these.
All functions are pure: they never mutate their inputs and are safe to call
from any number of threads.

Conventions, fixed on purpose because they are part of the weight
compatibility contract:

* convolution is zero-padded cross-correlation; the output extent is
  ``floor((h + 2*pad - kh) / stride) + 1`` (windows lie fully inside the
  padded extent, bottom/right padding beyond the last window is ignored);
* per-output-pixel accumulation runs channel-major, then kernel row, then
  kernel column — the im2col layout below encodes exactly that order;
* bilinear resampling uses half-pixel centers, ``src = (dst + 0.5) / scale
  - 0.5``, with border clamp;
* Gaussian blur replicates edges and normalizes the kernel to sum 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigurationError, ShapeError

__all__ = [
    "ConvParams",
    "conv2d",
    "leaky_relu",
    "sigmoid",
    "activation",
    "upsample_bilinear",
    "resize_bilinear",
    "concat_channels",
    "bilinear_sample",
    "image_gradients",
    "gaussian_blur",
    "gaussian_kernel_1d",
]


def as_nchw(x, name="input"):
    """Coerce to a float32 (n, c, h, w) array, validating rank and extents."""
    x = np.asarray(x, dtype=np.float32)
    if x.ndim != 4:
        raise ShapeError(f"{name} must be rank 4 (n, c, h, w), got shape {x.shape}")
    if min(x.shape) < 1:
        raise ShapeError(f"{name} has a zero-sized axis: {x.shape}")
    return x


@dataclass(frozen=True)
class ConvParams:
    """Weights for one convolution layer.

    kernel: (out_ch, in_ch, kh, kw) float32
    bias:   (out_ch,) float32
    stride: positive int, same for both axes
    padding: non-negative int, symmetric zero padding
    """

    kernel: np.ndarray
    bias: np.ndarray
    stride: int = 1
    padding: int = 0

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=np.float32)
        b = np.asarray(self.bias, dtype=np.float32).reshape(-1)
        if k.ndim != 4:
            raise ShapeError(f"kernel must be rank 4 (out, in, kh, kw), got {k.shape}")
        if b.shape[0] != k.shape[0]:
            raise ShapeError(f"bias length {b.shape[0]} != out channels {k.shape[0]}")
        if self.stride < 1:
            raise ConfigurationError(f"stride must be >= 1, got {self.stride}")
        if self.padding < 0:
            raise ConfigurationError(f"padding must be >= 0, got {self.padding}")
        object.__setattr__(self, "kernel", k)
        object.__setattr__(self, "bias", b)

    @property
    def out_ch(self):
        return self.kernel.shape[0]

    @property
    def in_ch(self):
        return self.kernel.shape[1]


def conv_output_extent(size, k, stride, pad):
    """Spatial output extent of a convolution along one axis."""
    span = size + 2 * pad - k
    if span < 0:
        raise ConfigurationError(
            f"kernel {k} does not fit input extent {size} with padding {pad}"
        )
    return span // stride + 1


def conv2d(x, params: ConvParams):
    """Zero-padded cross-correlation plus bias.

    Implemented as im2col + a single float32 GEMM; the column layout is
    (channel, kernel row, kernel column), fixing the accumulation order.
    """
    x = as_nchw(x)
    n, c, h, w = x.shape
    oc, ic, kh, kw = params.kernel.shape
    if c != ic:
        raise ShapeError(
            f"input channels {x.shape} do not match kernel {params.kernel.shape}"
        )
    s, p = params.stride, params.padding
    ho = conv_output_extent(h, kh, s, p)
    wo = conv_output_extent(w, kw, s, p)
    if ho < 1 or wo < 1:
        raise ConfigurationError(
            f"non-positive output size {ho}x{wo} for input {h}x{w}, "
            f"kernel {kh}x{kw}, stride {s}, padding {p}"
        )
    if p > 0:
        x = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
    win = sliding_window_view(x, (kh, kw), axis=(2, 3))[:, :, ::s, ::s]
    # win: (n, c, ho, wo, kh, kw) -> columns (n, ho*wo, c*kh*kw), C order keeps
    # (c, kh, kw) contiguous per output pixel.
    cols = np.ascontiguousarray(win.transpose(0, 2, 3, 1, 4, 5)).reshape(
        n, ho * wo, c * kh * kw
    )
    wmat = params.kernel.reshape(oc, c * kh * kw)
    out = cols @ wmat.T
    out += params.bias
    return np.ascontiguousarray(out.transpose(0, 2, 1).reshape(n, oc, ho, wo))


def leaky_relu(x, slope=0.2):
    x = np.asarray(x, dtype=np.float32)
    return np.where(x >= 0, x, np.float32(slope) * x)


def sigmoid(x):
    x = np.asarray(x, dtype=np.float32)
    # split by sign to avoid exp overflow warnings on large negatives
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def activation(x, kind, slope=0.2):
    """Elementwise nonlinearity: kind in {"leaky_relu", "sigmoid"}."""
    if kind == "leaky_relu":
        return leaky_relu(x, slope)
    if kind == "sigmoid":
        return sigmoid(x)
    raise ConfigurationError(f"unknown activation kind {kind!r}")


def _axis_lerp_weights(n_in, n_out):
    """Half-pixel-center source indices and weights for one axis."""
    src = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1.0)
    i0 = np.floor(src).astype(np.int64)
    i1 = np.minimum(i0 + 1, n_in - 1)
    frac = (src - i0).astype(np.float32)
    return i0, i1, frac


def resize_bilinear(x, out_h, out_w):
    """Bilinear resize of (n, c, h, w) to (n, c, out_h, out_w).

    Half-pixel centers, border clamp. Identity sizes return a copy.
    """
    x = as_nchw(x)
    n, c, h, w = x.shape
    if out_h < 1 or out_w < 1:
        raise ConfigurationError(f"output size {out_h}x{out_w} must be positive")
    if out_h == h and out_w == w:
        return x.copy()
    r0, r1, rf = _axis_lerp_weights(h, out_h)
    rows = x[:, :, r0, :] * (1.0 - rf)[None, None, :, None] + x[:, :, r1, :] * rf[
        None, None, :, None
    ]
    c0, c1, cf = _axis_lerp_weights(w, out_w)
    out = rows[:, :, :, c0] * (1.0 - cf) + rows[:, :, :, c1] * cf
    return out.astype(np.float32, copy=False)


def upsample_bilinear(x, factor):
    """Upsample spatial dims by an integer factor (factor 1 is the identity)."""
    if int(factor) != factor or factor < 1:
        raise ConfigurationError(f"factor must be a positive integer, got {factor}")
    x = as_nchw(x)
    if factor == 1:
        return x.copy()
    n, c, h, w = x.shape
    return resize_bilinear(x, h * int(factor), w * int(factor))


def concat_channels(a, b):
    """Stack b's channels after a's; all other dims must agree."""
    a = as_nchw(a, "a")
    b = as_nchw(b, "b")
    if a.shape[0] != b.shape[0] or a.shape[2:] != b.shape[2:]:
        raise ShapeError(f"cannot concat channels of {a.shape} and {b.shape}")
    return np.concatenate([a, b], axis=1)


def bilinear_sample(image, grid):
    """Sample image at continuous pixel coordinates with border clamp.

    image: (n, c, h, w)
    grid:  (n, gh, gw, 2) with grid[..., 0] = x (column), grid[..., 1] = y (row),
           or (gh, gw, 2) when n == 1.
    Returns (n, c, gh, gw).
    """
    image = as_nchw(image, "image")
    grid = np.asarray(grid, dtype=np.float32)
    if grid.ndim == 3:
        grid = grid[None]
    if grid.ndim != 4 or grid.shape[-1] != 2 or grid.shape[0] != image.shape[0]:
        raise ShapeError(
            f"grid shape {grid.shape} incompatible with image {image.shape}"
        )
    n, c, h, w = image.shape
    gx = np.clip(grid[..., 0], 0.0, w - 1.0)
    gy = np.clip(grid[..., 1], 0.0, h - 1.0)
    x0 = np.floor(gx).astype(np.int64)
    y0 = np.floor(gy).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (gx - x0).astype(np.float32)[:, None]
    fy = (gy - y0).astype(np.float32)[:, None]
    bidx = np.arange(n)[:, None, None, None]
    p00 = image[bidx, np.arange(c)[None, :, None, None], y0[:, None], x0[:, None]]
    p01 = image[bidx, np.arange(c)[None, :, None, None], y0[:, None], x1[:, None]]
    p10 = image[bidx, np.arange(c)[None, :, None, None], y1[:, None], x0[:, None]]
    p11 = image[bidx, np.arange(c)[None, :, None, None], y1[:, None], x1[:, None]]
    top = p00 * (1.0 - fx) + p01 * fx
    bot = p10 * (1.0 - fx) + p11 * fx
    return (top * (1.0 - fy) + bot * fy).astype(np.float32, copy=False)


def image_gradients(x):
    """Forward differences along x and y; last column/row are zero."""
    x = as_nchw(x)
    if x.shape[2] < 2 or x.shape[3] < 2:
        raise ShapeError(f"need at least 2x2 spatial extent, got {x.shape}")
    dx = np.zeros_like(x)
    dy = np.zeros_like(x)
    dx[:, :, :, :-1] = x[:, :, :, 1:] - x[:, :, :, :-1]
    dy[:, :, :-1, :] = x[:, :, 1:, :] - x[:, :, :-1, :]
    return dx, dy


def gaussian_kernel_1d(kernel_size, sigma):
    """Sampled, sum-normalized 1-D Gaussian of odd length."""
    if kernel_size < 1 or kernel_size % 2 == 0:
        raise ConfigurationError(f"kernel_size must be odd and >= 1, got {kernel_size}")
    if sigma <= 0:
        raise ConfigurationError(f"sigma must be > 0, got {sigma}")
    r = kernel_size // 2
    t = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return (k / k.sum()).astype(np.float32)


def _blur_axis(x, k, axis):
    r = len(k) // 2
    if r == 0:
        return x
    pad = [(0, 0)] * x.ndim
    pad[axis] = (r, r)
    xp = np.pad(x, pad, mode="edge")
    win = sliding_window_view(xp, len(k), axis=axis)
    return np.tensordot(win, k, axes=([-1], [0])).astype(np.float32, copy=False)


def gaussian_blur(x, kernel_size, sigma=None):
    """Separable Gaussian blur with edge replication.

    sigma defaults to kernel_size / 6 (covers roughly +-3 sigma).
    Constant images are fixed points up to float rounding.
    """
    x = as_nchw(x)
    if sigma is None:
        sigma = kernel_size / 6.0
    k = gaussian_kernel_1d(kernel_size, sigma)
    if kernel_size == 1:
        return x.copy()
    out = _blur_axis(x, k, axis=2)
    return _blur_axis(out, k, axis=3)
