"""Seed derivation and keyed pseudo-random primitives.

Every secret-dependent choice in the channel (which members encode, in
which order the links are read, how the membership filter hashes) is
derived from a nonce and a 256-bit master key through a SHA-256 hash
chain::

    H1 = SHA256(nonce || key)
    Hd = SHA256(H(d-1))          for d >= 2

Depth 1 seeds member selection, depth 2 the link permutation and depth 3
the Bloom filter.  The keystream is SHA-256 in counter mode.
"""

from __future__ import annotations

import hashlib
import os
import secrets
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, InvalidArgument

KEY_BYTES = 32
NONCE_BYTES = 64
DIGEST_BYTES = 32
BLOCK_BITS = DIGEST_BYTES * 8


def _read_hex_file(path, nbytes, what):
    text = Path(path).read_text(encoding="ascii")
    value = text.strip()
    if len(value) != 2 * nbytes:
        raise FormatError(
            f"{what} file {path}: expected {2 * nbytes} hex characters, got {len(value)}"
        )
    try:
        return bytes.fromhex(value)
    except ValueError as exc:
        raise FormatError(f"{what} file {path}: not hexadecimal") from exc


def _write_hex_file(path, data):
    path = Path(path)
    path.write_text(data.hex() + "\n", encoding="ascii")
    os.chmod(path, 0o600)


@dataclass(frozen=True)
class MasterKey:
    """The shared 256-bit secret."""

    bytes: bytes

    def __post_init__(self):
        if not isinstance(self.bytes, (bytes, bytearray)) or len(self.bytes) != KEY_BYTES:
            raise InvalidArgument(f"key must be exactly {KEY_BYTES} bytes")
        object.__setattr__(self, "bytes", bytes(self.bytes))

    @classmethod
    def generate(cls) -> "MasterKey":
        return cls(secrets.token_bytes(KEY_BYTES))

    @classmethod
    def from_hex(cls, text: str) -> "MasterKey":
        try:
            raw = bytes.fromhex(text.strip())
        except ValueError as exc:
            raise FormatError("key is not hexadecimal") from exc
        if len(raw) != KEY_BYTES:
            raise FormatError(f"key must be {2 * KEY_BYTES} hex characters")
        return cls(raw)

    @classmethod
    def load(cls, path) -> "MasterKey":
        return cls(_read_hex_file(path, KEY_BYTES, "key"))

    def save(self, path) -> None:
        _write_hex_file(path, self.bytes)

    def hex(self) -> str:
        return self.bytes.hex()

    def flip_bit(self, index: int) -> "MasterKey":
        """Copy of the key with bit ``index`` (0 = MSB of byte 0) inverted."""
        raw = bytearray(self.bytes)
        raw[index // 8] ^= 0x80 >> (index % 8)
        return MasterKey(bytes(raw))


# Per-user keys have the same shape; the codec never consumes them.
UserKey = MasterKey


@dataclass(frozen=True)
class Nonce:
    """512-bit value naming one communication instance."""

    bytes: bytes

    def __post_init__(self):
        if not isinstance(self.bytes, (bytes, bytearray)) or len(self.bytes) != NONCE_BYTES:
            raise InvalidArgument(f"nonce must be exactly {NONCE_BYTES} bytes")
        object.__setattr__(self, "bytes", bytes(self.bytes))

    @classmethod
    def generate(cls) -> "Nonce":
        return cls(secrets.token_bytes(NONCE_BYTES))

    @classmethod
    def from_hex(cls, text: str) -> "Nonce":
        try:
            raw = bytes.fromhex(text.strip())
        except ValueError as exc:
            raise FormatError("nonce is not hexadecimal") from exc
        if len(raw) != NONCE_BYTES:
            raise FormatError(f"nonce must be {2 * NONCE_BYTES} hex characters")
        return cls(raw)

    @classmethod
    def load(cls, path) -> "Nonce":
        return cls(_read_hex_file(path, NONCE_BYTES, "nonce"))

    def save(self, path) -> None:
        _write_hex_file(path, self.bytes)

    def hex(self) -> str:
        return self.bytes.hex()


@dataclass(frozen=True)
class SeedBundle:
    sel_seed: bytes
    perm_seed: bytes
    bloom_seed: bytes

    def __post_init__(self):
        if len({self.sel_seed, self.perm_seed, self.bloom_seed}) != 3:
            raise AssertionError("hash chain produced a repeated seed")


def hash_chain(x: bytes, k: bytes, depth: int) -> bytes:
    """Return the ``depth``-th SHA-256 chain value of ``x || k``."""
    if depth < 1:
        raise InvalidArgument("hash chain depth must be >= 1")
    digest = hashlib.sha256(bytes(x) + bytes(k)).digest()
    for _ in range(depth - 1):
        digest = hashlib.sha256(digest).digest()
    return digest


def derive_seeds(nonce: Nonce, key: MasterKey) -> SeedBundle:
    if not isinstance(nonce, Nonce) or not isinstance(key, MasterKey):
        raise InvalidArgument("derive_seeds expects a Nonce and a MasterKey")
    h1 = hash_chain(nonce.bytes, key.bytes, 1)
    h2 = hashlib.sha256(h1).digest()
    h3 = hashlib.sha256(h2).digest()
    return SeedBundle(sel_seed=h1, perm_seed=h2, bloom_seed=h3)


def _block(seed: bytes, counter: int) -> bytes:
    return hashlib.sha256(seed + counter.to_bytes(8, "big")).digest()


def keystream(seed: bytes, nbits: int) -> np.ndarray:
    """First ``nbits`` keystream bits as a uint8 array of 0/1 values.

    Block ``j`` is ``SHA256(seed || j)`` with ``j`` as 8-byte big-endian;
    bits are taken most significant first.
    """
    if nbits < 0:
        raise InvalidArgument("nbits must be >= 0")
    nblocks = -(-nbits // BLOCK_BITS)
    raw = b"".join(_block(seed, j) for j in range(nblocks))
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:nbits]


class KeystreamReader:
    """Sequential reader over the keystream of ``seed``.

    ``read(w)`` returns the next ``w`` bits as an unsigned integer, first
    bit most significant.  Bits are consumed in exactly the order
    :func:`keystream` lists them.
    """

    def __init__(self, seed: bytes):
        self.seed = bytes(seed)
        self._counter = 0
        self._buf = 0
        self._avail = 0
        self.consumed = 0

    def _refill(self):
        block = _block(self.seed, self._counter)
        self._counter += 1
        self._buf = (self._buf << BLOCK_BITS) | int.from_bytes(block, "big")
        self._avail += BLOCK_BITS

    def read(self, width: int) -> int:
        while self._avail < width:
            self._refill()
        self._avail -= width
        value = self._buf >> self._avail
        self._buf &= (1 << self._avail) - 1
        self.consumed += width
        return value

    def bit(self) -> int:
        return self.read(1)

    def __iter__(self):
        while True:
            yield self.read(1)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound]`` by rejection sampling."""
        width = bound.bit_length()
        while True:
            value = self.read(width)
            if value <= bound:
                return value


def keyed_permutation(seed: bytes, m: int) -> list[int]:
    """Deterministic uniform permutation of ``range(m)``.

    Fisher-Yates from the top index down; each swap partner for position
    ``i`` takes ``i.bit_length()`` keystream bits and redraws while the
    value exceeds ``i``.
    """
    if m < 1:
        raise InvalidArgument("permutation length must be >= 1")
    perm = list(range(m))
    reader = KeystreamReader(seed)
    for i in range(m - 1, 0, -1):
        j = reader.below(i)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def invert_permutation(perm) -> list[int]:
    inverse = [0] * len(perm)
    for position, value in enumerate(perm):
        inverse[value] = position
    return inverse


def tagged_seed(seed: bytes, tag: bytes) -> bytes:
    """Domain-separated sub-seed ``SHA256(seed || tag)``."""
    return hashlib.sha256(bytes(seed) + bytes(tag)).digest()
