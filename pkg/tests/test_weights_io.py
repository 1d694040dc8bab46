import io

import numpy as np
import pytest

from depthedge.weights_io import (
    BundleChecksumError,
    BundleFormatError,
    BundleTruncationError,
    BundleVersionError,
    WeightStore,
    load,
    load_bytes,
    save,
    save_bytes,
)


def random_store(rng, n_tensors=5):
    store = WeightStore()
    for i in range(n_tensors):
        rank = int(rng.integers(1, 5))
        dims = tuple(int(rng.integers(1, 7)) for _ in range(rank))
        name = f"tensor_{i}_" + "".join(
            rng.choice(list("abcxyz_0189")) for _ in range(int(rng.integers(1, 9)))
        )
        store.add(name, rng.standard_normal(dims).astype(np.float32))
    return store


class TestSave:
    def test_empty_store_is_16_bytes(self):
        blob = save_bytes(WeightStore())
        assert len(blob) == 16
        assert blob[:4] == b"LDWB"

    def test_round_trip_bit_identical(self):
        rng = np.random.default_rng(0)
        store = random_store(rng)
        loaded = load_bytes(save_bytes(store))
        assert loaded == store
        for name in store.names():
            assert loaded[name].tobytes() == store[name].tobytes()

    def test_save_deterministic(self):
        rng = np.random.default_rng(1)
        store = random_store(rng)
        assert save_bytes(store) == save_bytes(store)

    def test_save_to_file_and_path(self, tmp_path):
        store = random_store(np.random.default_rng(2))
        p = tmp_path / "w.ldwb"
        n = save(store, p)
        assert p.stat().st_size == n
        buf = io.BytesIO()
        assert save(store, buf) == n
        assert buf.getvalue() == p.read_bytes()
        assert load(p) == store

    def test_fuzzed_round_trips(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            store = random_store(rng, n_tensors=int(rng.integers(0, 8)))
            assert load_bytes(save_bytes(store)) == store


class TestLoadValidation:
    def test_bad_magic(self):
        blob = bytearray(save_bytes(WeightStore()))
        blob[0] ^= 0xFF
        with pytest.raises(BundleFormatError, match="not a weight bundle"):
            load_bytes(bytes(blob))

    def test_unsupported_version(self):
        blob = bytearray(save_bytes(WeightStore()))
        blob[4] = 9
        with pytest.raises(BundleVersionError):
            load_bytes(bytes(blob))

    def test_payload_flip_detected(self):
        store = WeightStore({"w": np.arange(12, dtype=np.float32).reshape(3, 4)})
        blob = bytearray(save_bytes(store))
        blob[-8] ^= 0x10  # inside the float payload
        with pytest.raises(BundleChecksumError, match="checksum mismatch"):
            load_bytes(bytes(blob))

    def test_truncation_mid_tensor(self):
        store = WeightStore({"w": np.arange(64, dtype=np.float32)})
        blob = save_bytes(store)
        with pytest.raises(BundleTruncationError, match="offset"):
            load_bytes(blob[: len(blob) - 40])

    def test_trailing_garbage_rejected(self):
        blob = save_bytes(WeightStore())
        with pytest.raises(BundleFormatError, match="trailing"):
            load_bytes(blob + b"xx")

    def test_store_validation(self):
        store = WeightStore()
        with pytest.raises(BundleFormatError):
            store.add("", np.zeros(3, np.float32))
        store.add("a", np.zeros(3, np.float32))
        with pytest.raises(BundleFormatError, match="duplicate"):
            store.add("a", np.zeros(3, np.float32))

    def test_every_single_byte_flip_detected_small_bundle(self):
        store = WeightStore({"ab": np.array([1.5, -2.0], np.float32)})
        blob = save_bytes(store)
        for pos in range(len(blob)):
            mutated = bytearray(blob)
            mutated[pos] ^= 0x01
            with pytest.raises(Exception):
                load_bytes(bytes(mutated))
