"""The LDWB weight container: bit-exact round trips and corruption checks.

Run:  python demos/06_weight_bundles.py
"""

import numpy as np

from depthedge.weights_io import (
    BundleChecksumError,
    WeightStore,
    load_bytes,
    save_bytes,
)

rng = np.random.default_rng(4)
store = WeightStore()
store.add("enc1a.weight", rng.standard_normal((16, 3, 3, 3)).astype(np.float32))
store.add("enc1a.bias", rng.standard_normal(16).astype(np.float32))

blob = save_bytes(store)
print(f"two tensors -> {len(blob)} bytes "
      f"(magic {blob[:4]!r}, trailing CRC-32 over the body)")

back = load_bytes(blob)
print("round trip bit-identical:", back == store)
print("saving twice is byte-identical:", save_bytes(store) == blob)

# flip one payload bit: the checksum must catch it
mutated = bytearray(blob)
mutated[100] ^= 0x04
try:
    load_bytes(bytes(mutated))
except BundleChecksumError as e:
    print("corruption detected:", e)

# an empty bundle is exactly 16 bytes: magic, version, count, checksum
print("empty bundle size:", len(save_bytes(WeightStore())))
