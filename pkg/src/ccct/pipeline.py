"""Sender and receiver paths over a carrier graph, plus the API bundle.

These are the operations the command line wraps; they compose the
keychain, membership, selection and link codec modules and nothing else.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, InvalidArgument, KeyMismatch
from .graphcore import AttributeDictionary, SocialGraph
from .keychain import MasterKey, Nonce, derive_seeds
from .linkcodec import Ciphertext, GraphMode, LinkOrder, decode, encode, permuted_order, trivial_order
from .membership import BloomFilter, validated_members
from .selection import select_subcommunity

BUNDLE_VERSION = 1


@dataclass
class ApiBundle:
    """What the sender ships to channel users besides the key."""

    nonce: Nonce
    bloom_path: str | None = None
    dictionary: AttributeDictionary | None = None
    mode: GraphMode = field(default_factory=lambda: GraphMode(False, False))
    s: int | None = None
    bits: int | None = None
    plan_path: str | None = None
    version: int = BUNDLE_VERSION

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "nonce": self.nonce.hex(),
            "bloom": self.bloom_path,
            "attributes": None if self.dictionary is None else self.dictionary.to_json(),
            "mode": self.mode.name,
            "s": self.s,
            "bits": self.bits,
            "plan": self.plan_path,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ApiBundle":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise FormatError(f"cannot read bundle {path}: {exc}") from exc
        if data.get("version") != BUNDLE_VERSION:
            raise FormatError(f"unsupported bundle version {data.get('version')!r}")

        def resolve(p):
            return None if p is None else str(path.parent / p)

        bundle = cls(
            nonce=Nonce.from_hex(data["nonce"]),
            bloom_path=resolve(data.get("bloom")),
            dictionary=None if data.get("attributes") is None
            else AttributeDictionary.from_json(data["attributes"]),
            mode=GraphMode.parse(data.get("mode", "undirected")),
            s=data.get("s"),
            bits=data.get("bits"),
            plan_path=resolve(data.get("plan")),
        )
        for ref in (bundle.bloom_path, bundle.plan_path):
            if ref is not None and not Path(ref).exists():
                raise FormatError(f"bundle references missing file {ref}")
        return bundle


def community_members(graph: SocialGraph, seeds, community=None, bloom: BloomFilter | None = None):
    """Members to select from: explicit list, or the carrier nodes passing the filter."""
    if bloom is not None and bloom.seed != seeds.bloom_seed:
        raise KeyMismatch("key/nonce do not match the membership filter")
    if community is not None:
        return sorted(community)
    if bloom is None:
        raise InvalidArgument("need either a community member list or a membership filter")
    return validated_members(graph, bloom)


def channel_order(graph: SocialGraph, key: MasterKey, nonce: Nonce, mode: GraphMode, s: int,
                  community=None, bloom=None, trivial: bool = False, scheme: str = "nodes") -> LinkOrder:
    if graph.directed != mode.directed:
        raise InvalidArgument(f"carrier is {'directed' if graph.directed else 'undirected'}, mode is {mode}")
    seeds = derive_seeds(nonce, key)
    members = community_members(graph, seeds, community, bloom)
    sub = select_subcommunity(members, s, seeds.sel_seed)
    if trivial:
        return trivial_order(sub, mode)
    return permuted_order(sub, mode, seeds.perm_seed, scheme=scheme)


def encode_carrier(graph: SocialGraph, key: MasterKey, nonce: Nonce, payload: Ciphertext,
                   mode: GraphMode, s: int, **kw) -> int:
    """Write ``payload`` into ``graph`` in place; returns links toggled."""
    order = channel_order(graph, key, nonce, mode, s, **kw)
    return encode(graph, order, payload)


def decode_carrier(graph: SocialGraph, key: MasterKey, nonce: Nonce, nbits: int | None,
                   mode: GraphMode, s: int, **kw) -> Ciphertext:
    order = channel_order(graph, key, nonce, mode, s, **kw)
    return decode(graph, order, nbits)


def read_members(path) -> list[int]:
    """Community file: one integer node id per line, ``#`` comments allowed."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                out.append(int(line))
            except ValueError as exc:
                raise FormatError(f"{path}: bad node id {line!r}") from exc
    return out


def write_members(path, members) -> None:
    Path(path).write_text("".join(f"{v}\n" for v in members), encoding="utf-8")
