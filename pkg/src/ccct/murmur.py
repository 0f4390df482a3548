"""MurmurHash3, 128-bit x64 flavour.

``murmur3_x64_128`` is a straight scalar port used for single keys and as
a cross-check; ``murmur3_x64_64_batch`` evaluates the first 64-bit half
for many equal-length keys under many seeds at once with numpy.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_C1 = 0x87C37B91114253D5
_C2 = 0x4CF5AD432745937F


def _rotl(x, r):
    return ((x << r) | (x >> (64 - r))) & _MASK


def _fmix(k):
    k ^= k >> 33
    k = (k * 0xFF51AFD7ED558CCD) & _MASK
    k ^= k >> 33
    k = (k * 0xC4CEB9FE1A85EC53) & _MASK
    k ^= k >> 33
    return k


def murmur3_x64_128(data: bytes, seed: int = 0) -> tuple[int, int]:
    """Return ``(h1, h2)``, the two unsigned 64-bit output words."""
    data = bytes(data)
    length = len(data)
    h1 = h2 = seed & 0xFFFFFFFF
    nblocks = length // 16
    for i in range(nblocks):
        k1 = int.from_bytes(data[16 * i : 16 * i + 8], "little")
        k2 = int.from_bytes(data[16 * i + 8 : 16 * i + 16], "little")
        k1 = (k1 * _C1) & _MASK
        k1 = _rotl(k1, 31)
        k1 = (k1 * _C2) & _MASK
        h1 ^= k1
        h1 = _rotl(h1, 27)
        h1 = (h1 + h2) & _MASK
        h1 = (h1 * 5 + 0x52DCE729) & _MASK
        k2 = (k2 * _C2) & _MASK
        k2 = _rotl(k2, 33)
        k2 = (k2 * _C1) & _MASK
        h2 ^= k2
        h2 = _rotl(h2, 31)
        h2 = (h2 + h1) & _MASK
        h2 = (h2 * 5 + 0x38495AB5) & _MASK
    tail = data[16 * nblocks :]
    if len(tail) > 8:
        k2 = int.from_bytes(tail[8:], "little")
        k2 = (k2 * _C2) & _MASK
        k2 = _rotl(k2, 33)
        k2 = (k2 * _C1) & _MASK
        h2 ^= k2
    if tail:
        k1 = int.from_bytes(tail[:8], "little")
        k1 = (k1 * _C1) & _MASK
        k1 = _rotl(k1, 31)
        k1 = (k1 * _C2) & _MASK
        h1 ^= k1
    h1 ^= length
    h2 ^= length
    h1 = (h1 + h2) & _MASK
    h2 = (h2 + h1) & _MASK
    h1 = _fmix(h1)
    h2 = _fmix(h2)
    h1 = (h1 + h2) & _MASK
    h2 = (h2 + h1) & _MASK
    return h1, h2


def murmur3_x64_128_bytes(data: bytes, seed: int = 0) -> bytes:
    h1, h2 = murmur3_x64_128(data, seed)
    return h1.to_bytes(8, "little") + h2.to_bytes(8, "little")


# vectorised variant

_U = np.uint64


def _vrotl(x, r):
    return (x << _U(r)) | (x >> _U(64 - r))


def _vfmix(k):
    k = k ^ (k >> _U(33))
    k = k * _U(0xFF51AFD7ED558CCD)
    k = k ^ (k >> _U(33))
    k = k * _U(0xC4CEB9FE1A85EC53)
    return k ^ (k >> _U(33))


def _le_words(keys: np.ndarray, start: int, stop: int) -> np.ndarray:
    """Little-endian integer from byte columns ``start:stop`` (may be short)."""
    word = np.zeros(keys.shape[0], dtype=np.uint64)
    for offset, col in enumerate(range(start, min(stop, keys.shape[1]))):
        word |= keys[:, col].astype(np.uint64) << _U(8 * offset)
    return word


def murmur3_x64_64_batch(keys: np.ndarray, seeds) -> np.ndarray:
    """First output word ``h1`` for every (seed, key) pair.

    ``keys`` is a ``(n, length)`` uint8 array of equal-length keys and
    ``seeds`` a sequence of 32-bit seeds; the result has shape
    ``(len(seeds), n)``.
    """
    keys = np.ascontiguousarray(keys, dtype=np.uint8)
    if keys.ndim != 2:
        raise ValueError("keys must be a 2-d uint8 array")
    n, length = keys.shape
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1, 1) & _U(0xFFFFFFFF)
    h1 = np.repeat(seeds, n, axis=1)
    h2 = h1.copy()
    c1, c2 = _U(_C1), _U(_C2)
    with np.errstate(over="ignore"):
        nblocks = length // 16
        for i in range(nblocks):
            k1 = _le_words(keys, 16 * i, 16 * i + 8)[None, :]
            k2 = _le_words(keys, 16 * i + 8, 16 * i + 16)[None, :]
            k1 = _vrotl(k1 * c1, 31) * c2
            h1 = h1 ^ k1
            h1 = _vrotl(h1, 27) + h2
            h1 = h1 * _U(5) + _U(0x52DCE729)
            k2 = _vrotl(k2 * c2, 33) * c1
            h2 = h2 ^ k2
            h2 = _vrotl(h2, 31) + h1
            h2 = h2 * _U(5) + _U(0x38495AB5)
        rem = length - 16 * nblocks
        base = 16 * nblocks
        if rem > 8:
            k2 = _le_words(keys, base + 8, length)[None, :]
            h2 = h2 ^ (_vrotl(k2 * c2, 33) * c1)
        if rem:
            k1 = _le_words(keys, base, min(base + 8, length))[None, :]
            h1 = h1 ^ (_vrotl(k1 * c1, 31) * c2)
        h1 = h1 ^ _U(length)
        h2 = h2 ^ _U(length)
        h1 = h1 + h2
        h2 = h2 + h1
        h1 = _vfmix(h1)
        h2 = _vfmix(h2)
        h1 = h1 + h2
    return h1
