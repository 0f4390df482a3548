"""Ciphertext bits as link presence inside the encoding sub-community.

Candidate links over the sub-community ``i1 < i2 < ... < is`` are listed
in the trivial order::

    undirected  {i1,i2}, {i1,i3}, ..., {i1,is}, {i2,i3}, ..., {is-1,is}
    directed    (i1,i2), ..., (i1,is), (i2,i1), (i2,i3), ..., (is,is-1)

with loops ``(ij, ij)`` appended in ascending ``j`` when the mode has
them.  A keyed permutation then fixes the reading order, and bit ``c_i``
says whether link ``e_i`` exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, GraphError, InvalidArgument
from .graphcore import SocialGraph
from .keychain import keyed_permutation
from .selection import SubCommunity

_MODE_NAMES = {
    (True, True): "directed-loops",
    (True, False): "directed",
    (False, True): "undirected-loops",
    (False, False): "undirected",
}


@dataclass(frozen=True)
class GraphMode:
    directed: bool
    loops: bool = False

    @property
    def name(self) -> str:
        return _MODE_NAMES[(self.directed, self.loops)]

    def __str__(self):
        return self.name

    @classmethod
    def parse(cls, text: str) -> "GraphMode":
        for key, name in _MODE_NAMES.items():
            if text == name:
                return cls(*key)
        raise InvalidArgument(f"unknown graph mode {text!r}; expected one of {sorted(_MODE_NAMES.values())}")

    @classmethod
    def of(cls, graph: SocialGraph) -> "GraphMode":
        return cls(graph.directed, graph.loops)

    @classmethod
    def all(cls) -> list["GraphMode"]:
        return [cls(d, l) for d, l in _MODE_NAMES]


def capacity(mode: GraphMode, s: int) -> int:
    """Number of candidate links (bits) on an ``s``-member sub-community."""
    minimum = 1 if mode.loops else 2
    if s < minimum:
        raise InvalidArgument(f"{mode.name} needs at least {minimum} members, got {s}")
    if mode.directed:
        return s * s if mode.loops else s * (s - 1)
    pairs = s * (s - 1) // 2
    return pairs + s if mode.loops else pairs


def capacity_curve(mode: GraphMode, sizes: Iterable[int]) -> list[tuple[int, float]]:
    """``(s, log2 capacity)`` rows for plotting."""
    return [(s, float(np.log2(capacity(mode, s)))) for s in sizes]


class Ciphertext:
    """Opaque payload as an exact-length bit string."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        if isinstance(bits, str):
            if set(bits) - {"0", "1"}:
                raise InvalidArgument("bit strings may only contain 0 and 1")
            arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
        else:
            arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
            if arr.size and not np.isin(arr, (0, 1)).all():
                raise InvalidArgument("bits must be 0 or 1")
        self.bits = arr.astype(np.uint8).reshape(-1)

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int | None = None) -> "Ciphertext":
        bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
        if nbits is not None:
            if nbits > bits.size:
                raise InvalidArgument(f"{nbits} bits requested from {len(data)} bytes")
            bits = bits[:nbits]
        return cls(bits)

    @classmethod
    def random(cls, nbits: int, rng: np.random.Generator) -> "Ciphertext":
        return cls(rng.integers(0, 2, nbits, dtype=np.uint8))

    def to_bytes(self) -> bytes:
        """Bits packed MSB first, zero-padded to whole bytes."""
        return np.packbits(self.bits).tobytes()

    def __len__(self):
        return int(self.bits.size)

    def __eq__(self, other):
        if not isinstance(other, Ciphertext):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __str__(self):
        return "".join("1" if b else "0" for b in self.bits)

    def __repr__(self):
        text = str(self)
        return f"Ciphertext({text if len(text) <= 64 else text[:61] + '...'!r}, nbits={len(self)})"

    def hamming(self, other: "Ciphertext") -> int:
        n = max(len(self), len(other))
        a = np.zeros(n, dtype=np.uint8)
        b = np.zeros(n, dtype=np.uint8)
        a[: len(self)] = self.bits
        b[: len(other)] = other.bits
        return int((a != b).sum())


def _as_bits(c) -> np.ndarray:
    return c.bits if isinstance(c, Ciphertext) else Ciphertext(c).bits


@dataclass(frozen=True)
class LinkOrder:
    """Reading order ``e_1 ... e_L`` of the candidate links."""

    links: tuple
    mode: GraphMode

    def __len__(self):
        return len(self.links)

    def __iter__(self):
        return iter(self.links)

    def __getitem__(self, i):
        return self.links[i]

    def nodes(self) -> list[int]:
        return sorted({v for pair in self.links for v in pair})


def index_pairs(s: int, mode: GraphMode) -> list[tuple[int, int]]:
    """Trivial order over positions ``0..s-1``."""
    if mode.directed:
        pairs = [(a, b) for a in range(s) for b in range(s) if a != b]
    else:
        pairs = [(a, b) for a in range(s) for b in range(a + 1, s)]
    if mode.loops:
        pairs.extend((a, a) for a in range(s))
    return pairs


def _normalize(a, b, mode):
    return (a, b) if mode.directed or a <= b else (b, a)


def _order_from(members: Sequence[int], mode: GraphMode, pairs) -> LinkOrder:
    capacity(mode, len(members))
    return LinkOrder(tuple(_normalize(members[a], members[b], mode) for a, b in pairs), mode)


def trivial_order(sub, mode: GraphMode) -> LinkOrder:
    members = list(sub.members if isinstance(sub, SubCommunity) else sub)
    return _order_from(members, mode, index_pairs(len(members), mode))


def permuted_order(sub, mode: GraphMode, perm_seed: bytes | None = None, *,
                   scheme: str = "nodes", perm: Sequence[int] | None = None) -> LinkOrder:
    """Keyed reading order.

    ``scheme="nodes"`` relabels the sub-community through a keyed
    permutation ``p`` of its ``s`` positions and then reads the trivial
    order, so the first link is ``{m[p[0]], m[p[1]]}``, the second
    ``{m[p[0]], m[p[2]]}`` and so on.  ``scheme="links"`` instead
    shuffles all ``L`` link positions of the trivial order.  ``perm``
    replaces the keyed permutation (a test hook).
    """
    members = list(sub.members if isinstance(sub, SubCommunity) else sub)
    pairs = index_pairs(len(members), mode)
    if scheme == "nodes":
        m = len(members)
    elif scheme == "links":
        m = len(pairs)
    else:
        raise InvalidArgument(f"unknown permutation scheme {scheme!r}")
    if perm is None:
        if perm_seed is None:
            raise InvalidArgument("perm_seed required")
        perm = keyed_permutation(perm_seed, m)
    elif sorted(perm) != list(range(m)):
        raise InvalidArgument("perm is not a permutation of the right length")
    if scheme == "nodes":
        relabelled = [members[p] for p in perm]
        return _order_from(relabelled, mode, pairs)
    return _order_from(members, mode, [pairs[p] for p in perm])


def _check_carrier(carrier: SocialGraph, order: LinkOrder):
    if carrier.directed != order.mode.directed:
        raise GraphError("carrier and link order disagree on directedness")
    if order.mode.loops and not carrier.loops:
        raise GraphError("link order uses loops but the carrier forbids them")


def encode(carrier: SocialGraph, order: LinkOrder, c) -> int:
    """Write ``c`` into ``carrier`` in place; returns the number of links toggled.

    Positions past ``len(c)`` are forced absent.
    """
    bits = _as_bits(c)
    if bits.size > len(order):
        raise CapacityError(f"payload of {bits.size} bits exceeds capacity {len(order)}")
    _check_carrier(carrier, order)
    missing = [v for v in order.nodes() if v not in carrier]
    if missing:
        raise GraphError(f"carrier lacks sub-community nodes {missing[:5]}")
    changed = 0
    n = bits.size
    for i, (a, b) in enumerate(order.links):
        changed += carrier.set_link(a, b, bool(bits[i]) if i < n else False)
    return changed


def decode(carrier: SocialGraph, order: LinkOrder, nbits: int | None = None) -> Ciphertext:
    if nbits is None:
        nbits = len(order)
    if nbits < 0 or nbits > len(order):
        raise CapacityError(f"cannot read {nbits} bits from {len(order)} links")
    _check_carrier(carrier, order)
    has = carrier.has_link
    return Ciphertext(np.fromiter((has(a, b) for a, b in order.links[:nbits]), dtype=np.uint8, count=nbits))


def reconfigure(carrier: SocialGraph, order: LinkOrder, old_c, new_c) -> int:
    """Move ``carrier`` from ``old_c`` to ``new_c`` touching only differing positions.

    Returns the number of links toggled.
    """
    old = _as_bits(old_c)
    new = _as_bits(new_c)
    L = len(order)
    if old.size > L or new.size > L:
        raise CapacityError(f"payload exceeds capacity {L}")
    _check_carrier(carrier, order)
    n = max(old.size, new.size)
    a = np.zeros(n, dtype=np.uint8)
    b = np.zeros(n, dtype=np.uint8)
    a[: old.size] = old
    b[: new.size] = new
    changed = 0
    for i in np.flatnonzero(a != b):
        u, v = order.links[i]
        changed += carrier.set_link(u, v, bool(b[i]))
    return changed
