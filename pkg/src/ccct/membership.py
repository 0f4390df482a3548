"""Keyed Bloom filter for clueless validation of community members.

Hash function ``j`` (1 <= j <= k) is MurmurHash3 x64/128 with the 32-bit
seed ``SHA256(filter_seed || j)[:4]`` (``j`` as 4-byte big-endian); its
first 64-bit output word modulo ``T`` is the bit position.  Keys are the
canonical bitset bytes of a profile's attribute vector.
"""

from __future__ import annotations

import hashlib
import math
import struct
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError, InvalidArgument
from .graphcore import AttributeVector
from .murmur import murmur3_x64_64_batch

DEFAULT_SIZE = 1 << 20
DEFAULT_HASHES = 64

MAGIC = b"CCCBLOOM"
_HEADER = struct.Struct(">8sQI32sQ")


def function_seeds(seed: bytes, k: int) -> np.ndarray:
    return np.array(
        [int.from_bytes(hashlib.sha256(seed + j.to_bytes(4, "big")).digest()[:4], "big")
         for j in range(1, k + 1)],
        dtype=np.uint64,
    )


def _as_key(item) -> bytes:
    if isinstance(item, AttributeVector):
        return item.to_bytes()
    return bytes(item)


class BloomFilter:
    """Bit array of ``size`` bits probed by ``hashes`` seeded MurmurHash3 functions."""

    def __init__(self, seed: bytes, size: int = DEFAULT_SIZE, hashes: int = DEFAULT_HASHES):
        if len(seed) != 32:
            raise InvalidArgument("filter seed must be 32 bytes")
        if size < 8 or size % 8:
            raise InvalidArgument("filter size must be a positive multiple of 8")
        if hashes < 1:
            raise InvalidArgument("at least one hash function is required")
        self.seed = bytes(seed)
        self.size = size
        self.hashes = hashes
        self.count = 0
        self.bits = np.zeros(size, dtype=bool)
        self._fseeds = function_seeds(self.seed, hashes)

    def __repr__(self):
        return f"<BloomFilter T={self.size} k={self.hashes} count={self.count}>"

    def positions(self, items: Sequence) -> np.ndarray:
        """``(hashes, len(items))`` array of bit positions."""
        keys = [_as_key(it) for it in items]
        out = np.empty((self.hashes, len(keys)), dtype=np.int64)
        by_length: dict[int, list[int]] = {}
        for idx, key in enumerate(keys):
            by_length.setdefault(len(key), []).append(idx)
        for length, idxs in by_length.items():
            block = np.frombuffer(b"".join(keys[i] for i in idxs), dtype=np.uint8)
            block = block.reshape(len(idxs), length)
            h = murmur3_x64_64_batch(block, self._fseeds)
            out[:, idxs] = (h % np.uint64(self.size)).astype(np.int64)
        return out

    def add(self, item) -> None:
        self.update([item])

    def update(self, items: Iterable, chunk: int = 8192) -> None:
        items = list(items)
        for start in range(0, len(items), chunk):
            part = items[start : start + chunk]
            self.bits[self.positions(part).ravel()] = True
            self.count += len(part)

    def query_many(self, items: Sequence, chunk: int = 8192) -> np.ndarray:
        items = list(items)
        result = np.empty(len(items), dtype=bool)
        for start in range(0, len(items), chunk):
            part = items[start : start + chunk]
            result[start : start + len(part)] = self.bits[self.positions(part)].all(axis=0)
        return result

    def __contains__(self, item) -> bool:
        return bool(self.query_many([item])[0])

    def fill_ratio(self) -> float:
        return float(self.bits.mean())

    def expected_fp_rate(self, count: int | None = None) -> float:
        n = self.count if count is None else count
        return (1.0 - math.exp(-self.hashes * n / self.size)) ** self.hashes

    def digest(self) -> bytes:
        """SHA-256 of the serialized filter, for community descriptors."""
        return hashlib.sha256(self.to_bytes()).digest()

    # serialization: magic, T, k, seed, count, raw bits (MSB-first)

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(MAGIC, self.size, self.hashes, self.seed, self.count)
        return header + np.packbits(self.bits).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "BloomFilter":
        if len(data) < _HEADER.size:
            raise FormatError("bloom filter payload truncated")
        magic, size, hashes, seed, count = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise FormatError("bad bloom filter magic")
        if size % 8 or len(data) != _HEADER.size + size // 8:
            raise FormatError("bloom filter payload length does not match header")
        bf = cls(seed, size, hashes)
        raw = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
        bf.bits = np.unpackbits(raw).astype(bool)
        bf.count = count
        return bf

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "BloomFilter":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def bloom_build(members: Iterable, seed: bytes, size: int = DEFAULT_SIZE,
                hashes: int = DEFAULT_HASHES) -> BloomFilter:
    bf = BloomFilter(seed, size, hashes)
    bf.update(members)
    return bf


def bloom_query(f: BloomFilter, candidate) -> bool:
    return candidate in f


def bloom_serialize(f: BloomFilter) -> bytes:
    return f.to_bytes()


def bloom_deserialize(data: bytes) -> BloomFilter:
    return BloomFilter.from_bytes(data)


def validated_members(graph, f: BloomFilter) -> list[int]:
    """Nodes of ``graph`` whose profile passes the filter, ascending."""
    nodes = graph.nodes()
    if not nodes:
        return []
    hits = f.query_many([graph.attributes(v) for v in nodes])
    return [v for v, ok in zip(nodes, hits) if ok]
