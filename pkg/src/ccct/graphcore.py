"""Social graph model: profiles as attribute bitsets, links, density.

A :class:`SocialGraph` is either directed or undirected and either allows
or forbids self-loops.  Node ids are dense non-negative integers handed
out at insertion and never reused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import FormatError, GraphError, InvalidArgument


@dataclass(frozen=True)
class AttributeVector:
    """An ``length``-bit feature pattern.

    Feature ``j`` (1-based) is stored so that the textual bit string reads
    feature 1 first: ``value``'s most significant of ``length`` bits is
    feature 1.
    """

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0 or self.value < 0 or self.value >> self.length:
            raise InvalidArgument("attribute value does not fit its length")

    @classmethod
    def zeros(cls, length: int) -> "AttributeVector":
        return cls(0, length)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "AttributeVector":
        value = 0
        length = 0
        for b in bits:
            value = (value << 1) | (1 if b else 0)
            length += 1
        return cls(value, length)

    @classmethod
    def from_features(cls, present: Iterable[int], length: int) -> "AttributeVector":
        """Vector with the given 1-based feature indices set."""
        value = 0
        for j in present:
            if not 1 <= j <= length:
                raise InvalidArgument(f"feature index {j} outside 1..{length}")
            value |= 1 << (length - j)
        return cls(value, length)

    @classmethod
    def from_hex(cls, text: str, length: int) -> "AttributeVector":
        return cls(int(text, 16) if text else 0, length)

    def __getitem__(self, j: int) -> int:
        if not 1 <= j <= self.length:
            raise IndexError(j)
        return (self.value >> (self.length - j)) & 1

    def __iter__(self) -> Iterator[int]:
        for j in range(1, self.length + 1):
            yield self[j]

    def __len__(self) -> int:
        return self.length

    def features(self) -> list[int]:
        return [j for j in range(1, self.length + 1) if self[j]]

    def to_bytes(self) -> bytes:
        """Canonical byte form: big-endian, ``ceil(length / 8)`` bytes."""
        return self.value.to_bytes((self.length + 7) // 8, "big")

    def hex(self) -> str:
        width = (self.length + 3) // 4
        return format(self.value, f"0{width}x") if width else ""

    def bitstring(self) -> str:
        return "".join(str(b) for b in self)


@dataclass(frozen=True)
class AttributeEntry:
    index: int
    name: str
    # None: presence/boolean semantics; a string: bit set iff value equals it
    domain: str | None = None


@dataclass
class AttributeDictionary:
    """Ordered correspondence between profile fields and bit indices."""

    entries: list[AttributeEntry] = field(default_factory=list)

    def __post_init__(self):
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise InvalidArgument("attribute names must be unique")
        if [e.index for e in self.entries] != list(range(1, len(self.entries) + 1)):
            raise InvalidArgument("attribute indices must be contiguous from 1")

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "AttributeDictionary":
        return cls([AttributeEntry(i, name) for i, name in enumerate(names, start=1)])

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def to_json(self) -> list[dict]:
        return [{"index": e.index, "name": e.name, "domain": e.domain} for e in self.entries]

    @classmethod
    def from_json(cls, data) -> "AttributeDictionary":
        return cls([AttributeEntry(int(d["index"]), str(d["name"]), d.get("domain")) for d in data])


class SocialGraph:
    """Node/link store for a directed or undirected social network."""

    def __init__(self, directed: bool = False, loops: bool = False, n_attributes: int = 0):
        self.directed = bool(directed)
        self.loops = bool(loops)
        self.n_attributes = n_attributes
        self._attrs: dict[int, AttributeVector] = {}
        self._succ: dict[int, set[int]] = {}
        self._pred: dict[int, set[int]] = {}
        self._retired: set[int] = set()
        self._next_id = 0
        self._nlinks = 0

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"<SocialGraph {kind} loops={self.loops} nodes={len(self._attrs)} links={self._nlinks}>"

    # nodes

    def add_node(self, attrs: AttributeVector | None = None, node_id: int | None = None) -> int:
        if attrs is None:
            attrs = AttributeVector.zeros(self.n_attributes)
        elif attrs.length != self.n_attributes:
            raise GraphError(
                f"attribute vector has {attrs.length} bits, graph declares {self.n_attributes}"
            )
        if node_id is None:
            node_id = self._next_id
        elif node_id < 0 or node_id in self._attrs or node_id in self._retired:
            raise GraphError(f"node id {node_id} unavailable")
        self._attrs[node_id] = attrs
        self._succ[node_id] = set()
        if self.directed:
            self._pred[node_id] = set()
        self._next_id = max(self._next_id, node_id + 1)
        return node_id

    def remove_node(self, node: int) -> None:
        self._require(node)
        for other in list(self._succ[node]):
            self.set_link(node, other, False)
        if self.directed:
            for other in list(self._pred[node]):
                self.set_link(other, node, False)
            del self._pred[node]
        del self._succ[node]
        del self._attrs[node]
        self._retired.add(node)

    def set_attributes(self, node: int, attrs: AttributeVector) -> None:
        self._require(node)
        if attrs.length != self.n_attributes:
            raise GraphError("attribute vector length mismatch")
        self._attrs[node] = attrs

    def attributes(self, node: int) -> AttributeVector:
        self._require(node)
        return self._attrs[node]

    def __contains__(self, node) -> bool:
        return node in self._attrs

    def nodes(self) -> list[int]:
        return sorted(self._attrs)

    def number_of_nodes(self) -> int:
        return len(self._attrs)

    def _require(self, node):
        if node not in self._attrs:
            raise GraphError(f"unknown node {node}")

    # links

    def has_link(self, a: int, b: int) -> bool:
        succ = self._succ.get(a)
        return succ is not None and b in succ

    def set_link(self, a: int, b: int, present: bool = True) -> bool:
        """Force link ``a -> b`` (or ``{a, b}``) present or absent.

        Returns True when the graph changed.
        """
        self._require(a)
        self._require(b)
        if a == b and not self.loops:
            raise GraphError(f"loop on node {a} forbidden in this graph")
        if present == (b in self._succ[a]):
            return False
        if present:
            self._succ[a].add(b)
            if self.directed:
                self._pred[b].add(a)
            else:
                self._succ[b].add(a)
            self._nlinks += 1
        else:
            self._succ[a].discard(b)
            if self.directed:
                self._pred[b].discard(a)
            else:
                self._succ[b].discard(a)
            self._nlinks -= 1
        return True

    def neighbors(self, node: int) -> set[int]:
        self._require(node)
        return set(self._succ[node])

    def links(self) -> Iterator[tuple[int, int]]:
        """Every link once; undirected links as ``(low, high)``."""
        for a in sorted(self._succ):
            for b in sorted(self._succ[a]):
                if self.directed or a <= b:
                    yield (a, b)

    def number_of_links(self) -> int:
        return self._nlinks

    def count_links_from_scratch(self) -> int:
        return sum(1 for _ in self.links())

    def induced_link_count(self, nodes: Iterable[int]) -> int:
        members = set(nodes)
        total = 0
        loops = 0
        for a in members:
            self._require(a)
            succ = self._succ[a]
            hits = len(succ & members) if len(succ) > len(members) else sum(1 for b in succ if b in members)
            total += hits
            if a in succ:
                loops += 1
        if self.directed:
            return total
        # each non-loop undirected link was counted from both ends
        return (total - loops) // 2 + loops

    def max_links(self, order: int) -> int:
        """Number of possible links among ``order`` nodes.

        Directed graphs always use ``order**2`` (the published density
        convention); undirected graphs add one slot per node when loops are
        allowed.
        """
        if self.directed:
            return order * order
        pairs = order * (order - 1) // 2
        return pairs + order if self.loops else pairs

    def copy(self) -> "SocialGraph":
        g = SocialGraph(self.directed, self.loops, self.n_attributes)
        g._attrs = dict(self._attrs)
        g._succ = {k: set(v) for k, v in self._succ.items()}
        g._pred = {k: set(v) for k, v in self._pred.items()}
        g._retired = set(self._retired)
        g._next_id = self._next_id
        g._nlinks = self._nlinks
        return g

    def subgraph(self, nodes: Iterable[int]) -> "SocialGraph":
        """Induced sub-graph on ``nodes`` (ids preserved)."""
        keep = set(nodes)
        g = SocialGraph(self.directed, self.loops, self.n_attributes)
        for v in sorted(keep):
            g.add_node(self.attributes(v), v)
        for v in keep:
            for w in self._succ[v]:
                if w in keep:
                    g.set_link(v, w, True)
        return g

    # canonical text

    def canonical_text(self) -> str:
        """Sorted text form: a ``G`` header, ``N id hex`` and ``L a b`` lines."""
        kind = "directed" if self.directed else "undirected"
        lines = [f"G {kind} {'loops' if self.loops else 'noloops'} {self.n_attributes}"]
        for node in self.nodes():
            lines.append(f"N {node} {self._attrs[node].hex() or '-'}")
        for a, b in self.links():
            lines.append(f"L {a} {b}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_canonical_text(cls, text: str) -> "SocialGraph":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("G "):
            raise FormatError("missing G header line")
        try:
            _, kind, loops, n = lines[0].split()
            graph = cls(kind == "directed", loops == "loops", int(n))
            for line in lines[1:]:
                if not line.strip():
                    continue
                tag, *rest = line.split()
                if tag == "N":
                    hexbits = "" if rest[1] == "-" else rest[1]
                    graph.add_node(AttributeVector.from_hex(hexbits, graph.n_attributes), int(rest[0]))
                elif tag == "L":
                    graph.set_link(int(rest[0]), int(rest[1]), True)
                else:
                    raise FormatError(f"unknown line tag {tag!r}")
        except (ValueError, IndexError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"bad canonical graph text: {exc}") from exc
        return graph


@dataclass(frozen=True)
class CommunityDescriptor:
    """A keyed community: its members, defining attributes and filter digest."""

    members: frozenset
    attribute_subset: frozenset = frozenset()
    bloom_digest: bytes = b""

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        object.__setattr__(self, "attribute_subset", frozenset(self.attribute_subset))

    @property
    def size(self) -> int:
        return len(self.members)

    def ordered(self) -> list[int]:
        return sorted(self.members)

    def check(self, graph: SocialGraph) -> None:
        missing = [m for m in self.members if m not in graph]
        if missing:
            raise GraphError(f"community members not in graph: {sorted(missing)[:5]}")


def density(g: SocialGraph, nodes: Iterable[int] | None = None) -> Fraction:
    """Present links over possible links, for the graph or an induced subset."""
    if nodes is None:
        order = g.number_of_nodes()
        present = g.number_of_links()
    else:
        members = set(nodes)
        order = len(members)
        present = g.induced_link_count(members) if members else 0
    if order == 0:
        raise InvalidArgument("density of an empty node set")
    possible = g.max_links(order)
    if possible == 0:
        raise InvalidArgument(f"no possible links among {order} node(s)")
    return Fraction(present, possible)


def is_community(g: SocialGraph, candidate: Iterable[int]) -> bool:
    members = set(candidate)
    if not members:
        raise InvalidArgument("empty community candidate")
    for m in members:
        g._require(m)
    return density(g, members) > density(g)


def set_link(g: SocialGraph, a: int, b: int, present: bool) -> SocialGraph:
    g.set_link(a, b, present)
    return g


def attribute_pattern_count(n: int) -> int:
    """Number of distinct n-bit profiles, ``2**n``."""
    if n < 0:
        raise InvalidArgument("attribute count must be >= 0")
    return 1 << n


def bell_number(m: int) -> int:
    """Number of partitions of an m-element set (Bell triangle)."""
    if m < 0:
        raise InvalidArgument("set size must be >= 0")
    row = [1]
    for _ in range(m):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]


def log2_int(value: int) -> float:
    """Base-2 logarithm of a possibly huge positive integer."""
    shift = max(value.bit_length() - 64, 0)
    return math.log2(value >> shift) + shift
