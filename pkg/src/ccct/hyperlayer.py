"""Multi-level channels over several communities.

Each community carries its own ciphertext on the links of its encoding
sub-community; one more ciphertext rides on the links *between*
communities.  Communities are hyperedges of a hypergraph and the
between-community channel is read over community index pairs exactly
like an intra-community channel is read over member pairs.

A meta-link between communities ``i`` and ``j`` is realised in the carrier
as one bridge link: the lexicographically smallest ordered pair ``(u, v)``
with ``u`` in hyperedge ``i``, ``v`` in hyperedge ``j``, ``u != v``, not
already a bridge, and not inside any single encoding sub-community (those
links belong to the intra-community channels).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Sequence

from .errors import CapacityError, FormatError, InvalidArgument
from .graphcore import SocialGraph
from .keychain import tagged_seed
from .linkcodec import Ciphertext, GraphMode, LinkOrder, decode, encode, permuted_order, trivial_order
from .selection import SubCommunity, select_subcommunity


@dataclass
class Hypergraph:
    vertices: set
    hyperedges: list  # list of frozensets

    def __post_init__(self):
        self.vertices = set(self.vertices)
        self.hyperedges = [frozenset(e) for e in self.hyperedges]
        for i, e in enumerate(self.hyperedges):
            if not e:
                raise InvalidArgument(f"hyperedge {i} is empty")
            if not e <= self.vertices:
                raise InvalidArgument(f"hyperedge {i} has vertices outside the vertex set")

    @classmethod
    def from_edges(cls, hyperedges) -> "Hypergraph":
        edges = [frozenset(e) for e in hyperedges]
        return cls(set().union(*edges) if edges else set(), edges)

    @property
    def order(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.hyperedges)

    def _edge(self, i):
        if not 0 <= i < len(self.hyperedges):
            raise InvalidArgument(f"unknown hyperedge index {i}")
        return self.hyperedges[i]

    def incidence(self, i: int, j: int) -> bool:
        return bool(self._edge(i) & self._edge(j))

    def adjacent(self, u, v) -> bool:
        return any(u in e and v in e for e in self.hyperedges)


def incidence(h: Hypergraph, i: int, j: int) -> bool:
    return h.incidence(i, j)


@dataclass
class MetaGraph:
    """One meta-node per community; meta-links are written by encoding."""

    nodes: list
    directed: bool = False
    links: set = field(default_factory=set)

    def possible_links(self) -> list[tuple[int, int]]:
        if self.directed:
            return [(a, b) for a in self.nodes for b in self.nodes if a != b]
        return list(combinations(self.nodes, 2))

    def set_link(self, a, b, present=True):
        if a == b:
            raise InvalidArgument("meta-loops are not allowed")
        key = (a, b) if self.directed else (min(a, b), max(a, b))
        if present:
            self.links.add(key)
        else:
            self.links.discard(key)


def meta_graph(h: Hypergraph, directed: bool = False) -> MetaGraph:
    return MetaGraph(list(range(h.size)), directed)


@dataclass
class CommunityLevel:
    hyperedge: frozenset
    sub: SubCommunity
    order: LinkOrder

    @property
    def capacity(self) -> int:
        return len(self.order)


@dataclass
class MultiChannelPlan:
    mode: GraphMode
    levels: list  # CommunityLevel per community
    meta_pairs: tuple  # community index pairs in reading order
    bridges: dict  # community index pair -> carrier node pair

    @property
    def meta_order(self) -> LinkOrder:
        return LinkOrder(tuple(self.bridges[p] for p in self.meta_pairs), self.mode)

    @property
    def capacities(self) -> list[int]:
        return [lv.capacity for lv in self.levels] + [len(self.meta_pairs)]

    def nodes(self) -> set:
        return set().union(*(lv.hyperedge for lv in self.levels)) if self.levels else set()


def _community_seed(seed, i):
    return tagged_seed(seed, b"community" + i.to_bytes(4, "big"))


def _meta_seed(seed):
    return tagged_seed(seed, b"meta")


def _bridges(hyperedges, subs, pairs, directed):
    owner = {}
    for k, sub in enumerate(subs):
        for v in sub:
            owner[v] = k
    used = set()
    bridges = {}
    for i, j in pairs:
        cands = sorted((u, v) for u in hyperedges[i] for v in hyperedges[j] if u != v)
        for u, v in cands:
            if u in owner and owner.get(v) == owner[u]:
                continue
            link = (u, v) if directed else (min(u, v), max(u, v))
            if link in used:
                continue
            used.add(link)
            bridges[(i, j)] = link
            break
        else:
            raise CapacityError(f"no free bridge link between communities {i} and {j}", level=len(subs))
    return bridges


def build_plan(h: Hypergraph, subcommunities: Sequence, mode: GraphMode,
               perm_seed: bytes | None = None, scheme: str = "nodes") -> MultiChannelPlan:
    """Plan from explicit encoding sub-communities, one per hyperedge.

    With ``perm_seed=None`` every level uses the trivial order.
    """
    if len(subcommunities) != h.size:
        raise InvalidArgument("need one encoding sub-community per hyperedge")
    subs = []
    seen = set()
    for i, members in enumerate(subcommunities):
        sub = members if isinstance(members, SubCommunity) else SubCommunity(tuple(sorted(members)))
        if not set(sub) <= h.hyperedges[i]:
            raise InvalidArgument(f"sub-community {i} is not inside hyperedge {i}")
        if seen & set(sub):
            raise InvalidArgument(f"sub-community {i} overlaps an earlier one; bits would alias")
        seen |= set(sub)
        subs.append(sub)
    levels = []
    for i, sub in enumerate(subs):
        if perm_seed is None:
            order = trivial_order(sub, mode)
        else:
            order = permuted_order(sub, mode, _community_seed(perm_seed, i), scheme=scheme)
        levels.append(CommunityLevel(h.hyperedges[i], sub, order))
    meta_mode = GraphMode(mode.directed, False)
    if h.size >= 2:
        if perm_seed is None:
            meta = trivial_order(range(h.size), meta_mode)
        else:
            meta = permuted_order(range(h.size), meta_mode, _meta_seed(perm_seed), scheme=scheme)
        pairs = meta.links
    else:
        pairs = ()
    bridges = _bridges(h.hyperedges, [lv.sub for lv in levels], sorted(pairs), mode.directed)
    return MultiChannelPlan(mode, levels, tuple(pairs), bridges)


def select_plan(h: Hypergraph, sizes: Sequence[int], mode: GraphMode, sel_seed: bytes,
                perm_seed: bytes, scheme: str = "nodes") -> MultiChannelPlan:
    """Keyed plan: community ``i`` selects ``sizes[i]`` members of its hyperedge
    not already claimed by communities ``0..i-1``."""
    if len(sizes) != h.size:
        raise InvalidArgument("need one size per hyperedge")
    claimed = set()
    subs = []
    for i, (edge, s) in enumerate(zip(h.hyperedges, sizes)):
        pool = sorted(edge - claimed)
        try:
            sub = select_subcommunity(pool, s, _community_seed(sel_seed, i))
        except CapacityError as exc:
            raise CapacityError(str(exc), level=i) from exc
        claimed |= set(sub)
        subs.append(sub)
    return build_plan(h, subs, mode, perm_seed, scheme)


def _check_payloads(plan, payloads):
    if len(payloads) != len(plan.levels) + 1:
        raise InvalidArgument(
            f"expected {len(plan.levels) + 1} payloads (one per community plus the meta level)"
        )
    cts = [p if isinstance(p, Ciphertext) else Ciphertext(p) for p in payloads]
    for level, (ct, cap) in enumerate(zip(cts, plan.capacities)):
        if len(ct) > cap:
            raise CapacityError(f"level {level}: {len(ct)} bits exceed capacity {cap}", level=level)
    return cts


def encode_multi(plan: MultiChannelPlan, carrier: SocialGraph, payloads: Sequence) -> int:
    """Write every level's payload; the last payload is the meta level.

    Returns the total number of links toggled.
    """
    cts = _check_payloads(plan, payloads)
    changed = 0
    for lv, ct in zip(plan.levels, cts):
        changed += encode(carrier, lv.order, ct)
    if plan.meta_pairs:
        changed += encode(carrier, plan.meta_order, cts[-1])
    return changed


def decode_multi(plan: MultiChannelPlan, carrier: SocialGraph,
                 lengths: Sequence[int] | None = None) -> list[Ciphertext]:
    if lengths is None:
        lengths = plan.capacities
    if len(lengths) != len(plan.levels) + 1:
        raise InvalidArgument("need one length per level")
    for level, (n, cap) in enumerate(zip(lengths, plan.capacities)):
        if n > cap:
            raise CapacityError(f"level {level}: {n} bits exceed capacity {cap}", level=level)
    out = [decode(carrier, lv.order, n) for lv, n in zip(plan.levels, lengths)]
    out.append(decode(carrier, plan.meta_order, lengths[-1]) if plan.meta_pairs else Ciphertext([]))
    return out


def meta_view(plan: MultiChannelPlan, carrier: SocialGraph) -> MetaGraph:
    """Meta-graph whose links are the bridges currently present in ``carrier``."""
    mg = MetaGraph(list(range(len(plan.levels))), plan.mode.directed)
    for (i, j), (u, v) in plan.bridges.items():
        if carrier.has_link(u, v):
            mg.set_link(i, j)
    return mg


# plan files

def load_plan_file(path):
    """Read a JSON plan file.

    Layout::

        {"mode": "undirected",
         "communities": [{"hyperedge": [..], "members": [..] | "s": n,
                          "payload": "c1.bin", "bits": 10}, ...],
         "meta": {"payload": "c5.bin", "bits": 6}}

    Payload paths are resolved relative to the plan file.  Returns
    ``(hypergraph, members_or_sizes, mode, payload_paths, bit_lengths)``.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        mode = GraphMode.parse(data.get("mode", "undirected"))
        comms = data["communities"]
        h = Hypergraph.from_edges([c["hyperedge"] for c in comms])
        if all("members" in c for c in comms):
            chosen = [sorted(c["members"]) for c in comms]
        elif all("s" in c for c in comms):
            chosen = [int(c["s"]) for c in comms]
        else:
            raise FormatError("every community needs either 'members' or 's'")
        meta = data.get("meta", {})
        payloads = [c.get("payload") for c in comms] + [meta.get("payload")]
        payloads = [None if p is None else path.parent / p for p in payloads]
        bits = [c.get("bits") for c in comms] + [meta.get("bits")]
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise FormatError(f"bad plan file {path}: {exc}") from exc
    return h, chosen, mode, payloads, bits
