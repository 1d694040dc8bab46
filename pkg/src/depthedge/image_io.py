"""File I/O for the command-line tools: PNG/PPM images, 16-bit depth PNGs,
and the LDRF raw float-map sidecar.

LDRF layout: magic "LDRF", u32 width, u32 height, then width*height
float32 values little-endian, row-major. Depth PNGs store
round(value * 65535) as 16-bit grayscale; ground-truth depth PNGs are
decoded as value / scale scene units with zero marking invalid pixels.
"""

from __future__ import annotations

import struct

import numpy as np
from PIL import Image

from .errors import ShapeError

__all__ = [
    "read_image",
    "write_image",
    "write_depth_png",
    "read_depth_png",
    "read_gt_depth_png",
    "write_ldrf",
    "read_ldrf",
]

LDRF_MAGIC = b"LDRF"


def read_image(path):
    """Load a PNG or binary PPM as (h, w, 3) uint8 RGB."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def write_image(path, rgb):
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ShapeError(f"expected (h, w, 3) uint8, got {rgb.shape} {rgb.dtype}")
    Image.fromarray(rgb, mode="RGB").save(path)


def write_depth_png(path, depth01):
    """Quantize a [0, 1] map to 16-bit grayscale PNG: round(d * 65535)."""
    d = np.asarray(depth01, dtype=np.float64)
    if d.ndim != 2:
        raise ShapeError(f"depth map must be 2-D, got {d.shape}")
    q = np.rint(np.clip(d, 0.0, 1.0) * 65535.0).astype(np.uint16)
    Image.fromarray(q).save(path)


def read_depth_png(path):
    """Dequantize a 16-bit depth PNG back to float32 in [0, 1]."""
    with Image.open(path) as im:
        arr = np.asarray(im)
    if arr.ndim != 2:
        raise ShapeError(f"expected single-channel depth PNG, got shape {arr.shape}")
    return (arr.astype(np.float32) / np.float32(65535.0)).astype(np.float32)


def read_gt_depth_png(path, scale=256.0):
    """16-bit ground-truth PNG -> metric depth (value/scale); 0 = invalid."""
    with Image.open(path) as im:
        arr = np.asarray(im)
    if arr.ndim != 2:
        raise ShapeError(f"expected single-channel depth PNG, got shape {arr.shape}")
    return (arr.astype(np.float64) / float(scale)).astype(np.float32)


def write_ldrf(path, values):
    v = np.ascontiguousarray(values, dtype="<f4")
    if v.ndim != 2:
        raise ShapeError(f"LDRF stores 2-D maps, got {v.shape}")
    h, w = v.shape
    with open(path, "wb") as f:
        f.write(LDRF_MAGIC)
        f.write(struct.pack("<II", w, h))
        f.write(v.tobytes())


def read_ldrf(path):
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 12 or data[:4] != LDRF_MAGIC:
        raise ValueError(f"{path}: not an LDRF float map")
    w, h = struct.unpack("<II", data[4:12])
    need = 12 + 4 * w * h
    if len(data) != need:
        raise ValueError(f"{path}: expected {need} bytes for {w}x{h}, found {len(data)}")
    return np.frombuffer(data, dtype="<f4", offset=12).reshape(h, w).astype(np.float32)
