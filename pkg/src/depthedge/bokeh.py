"""Depth-aware blur: pixels whose relative inverse depth exceeds a
threshold are replaced by a heavily Gaussian-blurred copy of the image.

The blur is computed once over the whole image and hard-composited per
pixel, so kept pixels stay bit-identical to the input and no halo from
masked-kernel normalization can appear. Note the selection follows the
inverse-depth comparison verbatim (d > tau selects *nearer* pixels);
invert_selection flips it for the opposite reading.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, ShapeError
from .tensor_ops import gaussian_blur, resize_bilinear

__all__ = ["apply_bokeh"]


def apply_bokeh(image, inv_depth, tau=0.7, kernel_size=25, sigma=None, invert_selection=False):
    """Composite of the input and its blurred copy, selected per pixel.

    image: (h, w, 3) uint8; inv_depth: (h, w) relative inverse depth in
    [0, 1], bilinearly resized to the image if dims differ. Pixels with
    inv_depth > tau take the blurred value; all others are bit-identical
    to the input.
    """
    if not 0.0 < tau < 1.0:
        raise ConfigurationError(f"tau must be in (0, 1), got {tau}")
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ShapeError(f"expected (h, w, 3) uint8 image, got {img.shape} {img.dtype}")
    d = np.asarray(inv_depth, dtype=np.float32)
    if d.ndim != 2:
        raise ShapeError(f"inv_depth must be (h, w), got {d.shape}")
    h, w = img.shape[:2]
    if d.shape != (h, w):
        d = resize_bilinear(d[None, None], h, w)[0, 0]

    planes = img.astype(np.float32).transpose(2, 0, 1)[None]
    blurred = gaussian_blur(planes, kernel_size, sigma)
    blurred_u8 = np.clip(np.rint(blurred[0].transpose(1, 2, 0)), 0, 255).astype(np.uint8)

    select = d > tau
    if invert_selection:
        select = ~select
    return np.where(select[:, :, None], blurred_u8, img)
