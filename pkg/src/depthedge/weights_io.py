"""Bit-exact binary container for trained weights (LDWB).

Layout, all integers little-endian:

    magic "LDWB" (4 bytes)
    u32 version = 1
    u32 tensor_count
    per tensor:
        u16 name_len, name bytes (UTF-8)
        u8  dtype (0 = float32)
        u8  rank
        u32 dims[rank]
        payload: float32 little-endian, row-major
    u32 CRC-32 (IEEE) over everything after the 8-byte magic+version prefix

An empty store is exactly 16 bytes. Saving is byte-deterministic; loading
validates magic, version, structure, and checksum.
"""

from __future__ import annotations

import io
import struct
import zlib

import numpy as np

__all__ = [
    "WeightStore",
    "save",
    "load",
    "save_bytes",
    "load_bytes",
    "BundleFormatError",
    "BundleVersionError",
    "BundleChecksumError",
    "BundleTruncationError",
]

MAGIC = b"LDWB"
VERSION = 1
DTYPE_F32 = 0


class BundleFormatError(ValueError):
    """Stream is not a weight bundle or violates the format."""


class BundleVersionError(BundleFormatError):
    """Bundle version is not supported by this reader."""


class BundleChecksumError(BundleFormatError):
    """Stored CRC-32 does not match the payload."""


class BundleTruncationError(BundleFormatError):
    """Stream ended before the format said it would."""


class WeightStore:
    """Ordered map from tensor name to a float32 ndarray."""

    def __init__(self, entries=None):
        self._entries: dict[str, np.ndarray] = {}
        if entries:
            for name, arr in dict(entries).items():
                self.add(name, arr)

    def add(self, name, array):
        if not isinstance(name, str) or not name:
            raise BundleFormatError(f"tensor name must be a non-empty string, got {name!r}")
        if name in self._entries:
            raise BundleFormatError(f"duplicate tensor name {name!r}")
        arr = np.ascontiguousarray(array, dtype=np.float32)
        if arr.ndim < 1:
            arr = arr.reshape(1)
        if min(arr.shape) < 1:
            raise BundleFormatError(f"tensor {name!r} has a zero-sized dim: {arr.shape}")
        self._entries[name] = arr

    def __getitem__(self, name):
        return self._entries[name]

    def __contains__(self, name):
        return name in self._entries

    def __len__(self):
        return len(self._entries)

    def names(self):
        return list(self._entries)

    def items(self):
        return self._entries.items()

    def __eq__(self, other):
        if not isinstance(other, WeightStore):
            return NotImplemented
        if self.names() != other.names():
            return False
        return all(
            a.shape == other._entries[n].shape
            and a.tobytes() == other._entries[n].tobytes()
            for n, a in self._entries.items()
        )

    def __repr__(self):
        return f"WeightStore({len(self)} tensors)"


def save_bytes(store: WeightStore) -> bytes:
    body = io.BytesIO()
    body.write(struct.pack("<I", len(store)))
    for name, arr in store.items():
        nb = name.encode("utf-8")
        if len(nb) > 0xFFFF:
            raise BundleFormatError(f"tensor name too long ({len(nb)} bytes)")
        body.write(struct.pack("<H", len(nb)))
        body.write(nb)
        body.write(struct.pack("<BB", DTYPE_F32, arr.ndim))
        body.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        body.write(arr.astype("<f4", copy=False).tobytes())
    payload = body.getvalue()
    crc = zlib.crc32(payload) & 0xFFFFFFFF
    return MAGIC + struct.pack("<I", VERSION) + payload + struct.pack("<I", crc)


def save(store: WeightStore, sink) -> int:
    """Write the bundle to a path or binary file object; returns bytes written."""
    blob = save_bytes(store)
    if hasattr(sink, "write"):
        sink.write(blob)
    else:
        with open(sink, "wb") as f:
            f.write(blob)
    return len(blob)


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.off = 0

    def take(self, n, what):
        if self.off + n > len(self.data):
            raise BundleTruncationError(
                f"stream truncated reading {what}: need {n} bytes at offset {self.off}, "
                f"have {len(self.data) - self.off}"
            )
        out = self.data[self.off : self.off + n]
        self.off += n
        return out

    def u8(self, what):
        return self.take(1, what)[0]

    def u16(self, what):
        return struct.unpack("<H", self.take(2, what))[0]

    def u32(self, what):
        return struct.unpack("<I", self.take(4, what))[0]


def load_bytes(data: bytes) -> WeightStore:
    cur = _Cursor(data)
    magic = cur.take(4, "magic")
    if magic != MAGIC:
        raise BundleFormatError(f"not a weight bundle (magic {magic!r})")
    version = cur.u32("version")
    if version != VERSION:
        raise BundleVersionError(f"unsupported bundle version {version}")
    if len(data) < 16:
        raise BundleTruncationError(
            f"stream truncated: bundle is {len(data)} bytes, minimum is 16"
        )
    count = cur.u32("tensor count")
    store = WeightStore()
    for t in range(count):
        name_len = cur.u16(f"name length of tensor {t}")
        name_raw = cur.take(name_len, f"name of tensor {t}")
        try:
            name = name_raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise BundleFormatError(f"tensor {t} name is not valid UTF-8") from e
        dtype = cur.u8(f"dtype of {name!r}")
        if dtype != DTYPE_F32:
            raise BundleFormatError(f"tensor {name!r} has unsupported dtype {dtype}")
        rank = cur.u8(f"rank of {name!r}")
        if rank < 1:
            raise BundleFormatError(f"tensor {name!r} has rank 0")
        dims = struct.unpack(f"<{rank}I", cur.take(4 * rank, f"dims of {name!r}"))
        if any(d < 1 for d in dims):
            raise BundleFormatError(f"tensor {name!r} has zero-sized dims {dims}")
        numel = 1
        for d in dims:
            numel *= d
        raw = cur.take(4 * numel, f"payload of {name!r}")
        arr = np.frombuffer(raw, dtype="<f4").reshape(dims).astype(np.float32)
        store.add(name, arr)
    stored_crc = cur.u32("checksum")
    if cur.off != len(data):
        raise BundleFormatError(
            f"{len(data) - cur.off} trailing bytes after checksum"
        )
    actual = zlib.crc32(data[8:-4]) & 0xFFFFFFFF
    if actual != stored_crc:
        raise BundleChecksumError(
            f"checksum mismatch: stored {stored_crc:#010x}, computed {actual:#010x}"
        )
    return store


def load(source) -> WeightStore:
    """Read a bundle from a path or binary file object."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        with open(source, "rb") as f:
            data = f.read()
    return load_bytes(data)
