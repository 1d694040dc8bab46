"""The dense kernels underneath everything, on arrays small enough to read.

Run:  python demos/02_kernels.py
"""

import numpy as np

from depthedge.tensor_ops import (
    ConvParams,
    bilinear_sample,
    conv2d,
    gaussian_blur,
    image_gradients,
    upsample_bilinear,
)

np.set_printoptions(precision=3, suppress=True)

# --- convolution: all-ones 3x3 kernel over an all-ones image counts the
# neighbours each pixel can see through the zero padding
x = np.ones((1, 1, 3, 3), np.float32)
p = ConvParams(kernel=np.ones((1, 1, 3, 3), np.float32), bias=np.zeros(1), padding=1)
print("conv2d, ones(3x3) * ones(3x3), pad 1:")
print(conv2d(x, p)[0, 0], "\n")

# stride 2 halves even extents (windows stay inside the padded frame)
x = np.arange(16, dtype=np.float32).reshape(1, 1, 4, 4)
p = ConvParams(kernel=np.ones((1, 1, 3, 3), np.float32), bias=np.zeros(1),
               stride=2, padding=1)
print("conv2d stride 2 on 4x4 -> output dims", conv2d(x, p).shape[2:], "\n")

# --- bilinear upsampling: half-pixel centers, border clamp
x = np.array([[0.0, 1.0], [2.0, 3.0]], np.float32)
print("upsample_bilinear x2 of [[0,1],[2,3]]:")
print(upsample_bilinear(x[None, None], 2)[0, 0], "\n")

# --- warping backend: sample an image at arbitrary continuous coordinates
ramp = np.tile(np.arange(5, dtype=np.float32), (3, 1))
gx, gy = np.meshgrid(np.arange(5, dtype=np.float32), np.arange(3, dtype=np.float32))
grid = np.stack([gx + 0.5, gy], axis=-1)[None]  # half-pixel shift right
print("ramp sampled half a pixel to the right (last column clamps):")
print(bilinear_sample(ramp[None, None], grid)[0, 0], "\n")

# --- forward differences feed the edge-aware losses
x = np.array([[0.0, 2.0], [4.0, 8.0]], np.float32)[None, None]
dx, dy = image_gradients(x)
print("image_gradients of [[0,2],[4,8]]: dx =", dx[0, 0].tolist(),
      " dy =", dy[0, 0].tolist(), "\n")

# --- the bokeh blur: an impulse spreads into the sampled Gaussian
x = np.zeros((1, 1, 9, 9), np.float32)
x[0, 0, 4, 4] = 1.0
print("gaussian_blur(impulse, 5, sigma=1) center row:")
print(gaussian_blur(x, 5, 1.0)[0, 0, 4])
