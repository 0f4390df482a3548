"""Keyed choice of the encoding sub-community by keystream decimation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CapacityError, InvalidArgument
from .graphcore import CommunityDescriptor
from .keychain import KeystreamReader


@dataclass(frozen=True)
class SubCommunity:
    members: tuple  # ascending node ids
    parent: CommunityDescriptor | None = None

    def __post_init__(self):
        members = tuple(self.members)
        if any(a >= b for a, b in zip(members, members[1:])):
            raise InvalidArgument("sub-community members must be strictly increasing")
        object.__setattr__(self, "members", members)
        if self.parent is not None and not set(members) <= self.parent.members:
            raise InvalidArgument("sub-community is not contained in its community")

    @property
    def s(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _members_of(c) -> list[int]:
    if isinstance(c, CommunityDescriptor):
        return c.ordered()
    return sorted(set(c))


def decimate(members: list[int], s: int, bits: Iterator[int]) -> list[int]:
    """Keep ``members[i]`` whenever its bit is 1 until ``s`` are kept.

    Members left over after a full pass are walked again, in order, with
    fresh bits.
    """
    kept = []
    remaining = list(members)
    while len(kept) < s:
        leftover = []
        for v in remaining:
            if len(kept) == s:
                break
            try:
                bit = next(bits)
            except StopIteration:
                raise InvalidArgument("bit source exhausted before selection completed") from None
            if bit:
                kept.append(v)
            else:
                leftover.append(v)
        remaining = leftover
    return sorted(kept)


def select_subcommunity(c, s: int, sel_seed: bytes, bits: Iterable[int] | None = None) -> SubCommunity:
    """Select ``s`` members of community ``c`` driven by ``sel_seed``.

    ``bits`` overrides the keystream (a test hook).
    """
    members = _members_of(c)
    if s < 1:
        raise InvalidArgument("sub-community size must be >= 1")
    if s > len(members):
        raise CapacityError(f"cannot select {s} members from a community of {len(members)}")
    source = iter(bits) if bits is not None else iter(KeystreamReader(sel_seed))
    chosen = decimate(members, s, source)
    return SubCommunity(tuple(chosen), c if isinstance(c, CommunityDescriptor) else None)


def selection_agreement(c, s: int, seed_a: bytes, seed_b: bytes) -> int:
    a = select_subcommunity(c, s, seed_a)
    b = select_subcommunity(c, s, seed_b)
    return len(set(a.members) & set(b.members))
