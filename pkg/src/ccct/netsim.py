"""Cover-network generation and end-to-end channel scenarios.

The cover model is a uniform random background with one denser embedded
community of neutral (uniformly random) profiles.  ``run_scenario`` takes
a payload through the whole send/receive path, including a GEXF
export/import of the carrier, and reports what happened.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapacityError, FormatError, InvalidArgument
from .gexfio import graph_to_text, text_to_graph
from .graphcore import AttributeVector, CommunityDescriptor, SocialGraph, density, is_community
from .keychain import MasterKey, Nonce, derive_seeds
from .linkcodec import Ciphertext, GraphMode, capacity, decode, encode, permuted_order
from .membership import bloom_build, validated_members
from .selection import select_subcommunity


@dataclass
class CoverSpec:
    total_nodes: int
    community_nodes: int
    n_attributes: int = 48
    background_p: float = 0.01
    community_density: float = 0.3
    seed: int = 0
    directed: bool = False

    def validate(self) -> None:
        if not 0 < self.community_nodes <= self.total_nodes:
            raise InvalidArgument("community size must be in 1..total_nodes")
        if not (0.0 <= self.background_p <= 1.0 and 0.0 <= self.community_density <= 1.0):
            raise InvalidArgument("densities must lie in [0, 1]")
        if self.community_nodes == self.total_nodes:
            raise InvalidArgument(
                "infeasible: a community spanning the whole graph cannot be denser than it"
            )
        if self.community_density <= self.background_p:
            raise InvalidArgument("infeasible: community density target must exceed background density")

    @classmethod
    def from_json(cls, data: dict) -> "CoverSpec":
        try:
            return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})
        except TypeError as exc:
            raise FormatError(f"bad cover spec: {exc}") from exc


# Parameters tuned so the carrier lands near 94.5k links before and after a
# 4,096-bit payload is written on a 237-member sub-community.
DESK_SCALE = CoverSpec(
    total_nodes=1489, community_nodes=357, n_attributes=48,
    background_p=0.0753, community_density=0.3, seed=2024,
)


def load_scenario_config(path) -> tuple[CoverSpec, dict]:
    """JSON file with CoverSpec fields plus optional ``s``, ``payload_bits``, ``loops``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read scenario config {path}: {exc}") from exc
    extra = {k: data[k] for k in ("s", "payload_bits", "loops", "scheme") if k in data}
    return CoverSpec.from_json(data), extra


def _max_pairs(n, directed):
    return n * (n - 1) if directed else n * (n - 1) // 2


def _sample_pairs(rng, n, count, directed, reject=None):
    """``count`` distinct uniform node-index pairs (no loops) over ``range(n)``."""
    chosen = np.empty(0, dtype=np.int64)
    while chosen.size < count:
        need = count - chosen.size
        batch = int(need * 1.3) + 64
        i = rng.integers(0, n, batch)
        j = rng.integers(0, n, batch)
        ok = i != j
        i, j = i[ok], j[ok]
        if not directed:
            i, j = np.minimum(i, j), np.maximum(i, j)
        if reject is not None:
            keep = ~reject(i, j)
            i, j = i[keep], j[keep]
        codes = np.concatenate([chosen, i * n + j])
        _, first = np.unique(codes, return_index=True)
        chosen = codes[np.sort(first)]
    return chosen[:count] // n, chosen[:count] % n


def _random_profiles(rng, count, n_attributes):
    seen = set()
    out = []
    nbytes = (n_attributes + 7) // 8
    while len(out) < count:
        raw = int.from_bytes(rng.bytes(nbytes), "big") >> (8 * nbytes - n_attributes)
        if raw in seen and (1 << n_attributes) > 4 * count:
            continue
        seen.add(raw)
        out.append(AttributeVector(raw, n_attributes))
    return out


def generate_cover(spec: CoverSpec, loops: bool = False) -> tuple[SocialGraph, CommunityDescriptor]:
    """Random cover network with a denser community drowned inside it."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n, c = spec.total_nodes, spec.community_nodes
    graph = SocialGraph(spec.directed, loops, spec.n_attributes)
    for attrs in _random_profiles(rng, n, spec.n_attributes):
        graph.add_node(attrs)
    members = np.sort(rng.choice(n, c, replace=False))
    in_comm = np.zeros(n, dtype=bool)
    in_comm[members] = True

    internal = int(round(spec.community_density * _max_pairs(c, spec.directed)))
    ci, cj = _sample_pairs(rng, c, internal, spec.directed)
    background_slots = _max_pairs(n, spec.directed) - _max_pairs(c, spec.directed)
    nb = int(rng.binomial(background_slots, spec.background_p)) if background_slots else 0
    bi, bj = _sample_pairs(rng, n, nb, spec.directed, reject=lambda i, j: in_comm[i] & in_comm[j])

    for a, b in zip(members[ci].tolist(), members[cj].tolist()):
        graph.set_link(a, b, True)
    for a, b in zip(bi.tolist(), bj.tolist()):
        graph.set_link(a, b, True)

    community = CommunityDescriptor(
        frozenset(members.tolist()), frozenset(range(1, spec.n_attributes + 1))
    )
    if not is_community(graph, community.members):
        raise InvalidArgument("infeasible: generated community is not denser than the graph")
    return graph, community


@dataclass
class ScenarioReport:
    nodes: int = 0
    edges_before: int = 0
    edges_after: int = 0
    community_size: int = 0
    s: int = 0
    mode: str = ""
    payload_bits: int = 0
    capacity: int = 0
    density_before: float = 0.0
    density_after: float = 0.0
    community_density_before: float = 0.0
    community_density_after: float = 0.0
    is_community_after: bool = False
    link_changes: int = 0
    gexf_bytes: int = 0
    validated_members: int = 0
    false_positives: int = 0
    key_check: bool = False
    roundtrip_ok: bool = False
    outcome: str = ""
    wall_time: float = 0.0
    stage_times: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            if key == "stage_times":
                for stage, t in value.items():
                    lines.append(f"time_{stage}={t:.4f}")
            elif isinstance(value, float):
                lines.append(f"{key}={value:.6g}")
            else:
                lines.append(f"{key}={str(value).lower() if isinstance(value, bool) else value}")
        return "\n".join(lines) + "\n"


def run_scenario(spec: CoverSpec, payload, nonce: Nonce, key: MasterKey, s: int,
                 mode: GraphMode | None = None, decode_key: MasterKey | None = None,
                 scheme: str = "nodes", dump_dir=None):
    """Send ``payload`` through a generated cover network and read it back.

    ``decode_key`` lets the receiver hold a different key (key-mismatch
    experiments).  Returns ``(report, recovered_ciphertext, carrier)``.
    """
    payload = payload if isinstance(payload, Ciphertext) else Ciphertext(payload)
    mode = mode or GraphMode(spec.directed, False)
    if mode.directed != spec.directed:
        raise InvalidArgument("scenario mode and cover spec disagree on directedness")
    cap = capacity(mode, s)
    if len(payload) > cap:
        raise CapacityError(f"payload of {len(payload)} bits exceeds capacity {cap} for s={s}")
    if s > spec.community_nodes:
        raise CapacityError(f"s={s} exceeds community size {spec.community_nodes}")

    report = ScenarioReport(s=s, mode=mode.name, payload_bits=len(payload), capacity=cap)
    times = report.stage_times
    t0 = last = time.perf_counter()

    def lap(name):
        nonlocal last
        now = time.perf_counter()
        times[name] = now - last
        last = now

    graph, community = generate_cover(spec, loops=mode.loops)
    report.nodes = graph.number_of_nodes()
    report.edges_before = graph.number_of_links()
    report.community_size = community.size
    report.density_before = float(density(graph))
    report.community_density_before = float(density(graph, community.members))
    lap("generate")

    seeds = derive_seeds(nonce, key)
    bloom = bloom_build([graph.attributes(v) for v in community.ordered()], seeds.bloom_seed)
    community = CommunityDescriptor(community.members, community.attribute_subset, bloom.digest())
    lap("bloom")

    sub = select_subcommunity(community, s, seeds.sel_seed)
    order = permuted_order(sub, mode, seeds.perm_seed, scheme=scheme)
    lap("order")

    report.link_changes = encode(graph, order, payload)
    report.edges_after = graph.number_of_links()
    report.density_after = float(density(graph))
    report.community_density_after = float(density(graph, community.members))
    report.is_community_after = is_community(graph, community.members)
    lap("encode")

    text = graph_to_text(graph, description="cover network")
    report.gexf_bytes = len(text.encode("utf-8"))
    received = text_to_graph(text, loops=mode.loops)
    lap("gexf")

    rseeds = derive_seeds(nonce, decode_key or key)
    report.key_check = rseeds.bloom_seed == bloom.seed
    found = validated_members(received, bloom)
    report.validated_members = len(found)
    report.false_positives = len(set(found) - community.members)
    lap("validate")

    recovered = None
    try:
        rsub = select_subcommunity(found, s, rseeds.sel_seed)
        rorder = permuted_order(rsub, mode, rseeds.perm_seed, scheme=scheme)
        recovered = decode(received, rorder, len(payload))
        report.roundtrip_ok = recovered == payload
    except CapacityError:
        report.roundtrip_ok = False
    lap("decode")

    if report.roundtrip_ok:
        report.outcome = "ok"
    elif not report.key_check:
        report.outcome = "key-mismatch"
    else:
        report.outcome = "corrupted"
    report.wall_time = time.perf_counter() - t0

    if dump_dir is not None:
        dump_views(graph, community, sub, dump_dir)
    return report, recovered, graph


def dump_views(graph: SocialGraph, community: CommunityDescriptor, sub, out_dir) -> list[Path]:
    """GEXF files of the whole carrier, the community and the encoding nodes."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    views = {
        "all_nodes.gexf": graph,
        "community.gexf": graph.subgraph(community.members),
        "encoding_subcommunity.gexf": graph.subgraph(sub.members),
    }
    paths = []
    for name, g in views.items():
        path = out_dir / name
        path.write_text(graph_to_text(g), encoding="utf-8")
        paths.append(path)
    return paths


@dataclass
class ChurnReport:
    steps: int = 0
    toggled: int = 0
    skipped: int = 0
    invariant_violations: int = 0


def churn(g: SocialGraph, community: CommunityDescriptor, sub, steps: int, churn_rate: float,
          seed: int = 0) -> ChurnReport:
    """Rewire links at random without touching the encoding sub-community.

    Each step removes ``round(churn_rate * links)`` random links and adds
    as many random absent ones, so overall density stays put.  A pick that
    falls inside ``sub x sub`` is skipped and counted.  The community
    density invariant is re-checked after every step.
    """
    if not 0.0 <= churn_rate <= 1.0:
        raise InvalidArgument("churn rate must lie in [0, 1]")
    protected = set(sub.members if hasattr(sub, "members") else sub)
    rng = np.random.default_rng(seed)
    nodes = g.nodes()
    links = list(g.links())
    where = {link: i for i, link in enumerate(links)}
    report = ChurnReport()

    def key(a, b):
        return (a, b) if g.directed or a <= b else (b, a)

    def drop(link):
        i = where.pop(link)
        last = links.pop()
        if i < len(links):
            links[i] = last
            where[last] = i

    for _ in range(steps):
        k = int(round(churn_rate * len(links)))
        for _ in range(k):
            if not links:
                break
            link = links[int(rng.integers(len(links)))]
            if link[0] in protected and link[1] in protected:
                report.skipped += 1
                continue
            g.set_link(*link, False)
            drop(link)
            report.toggled += 1
        added = 0
        attempts = 0
        while added < k and attempts < 20 * k + 100:
            attempts += 1
            a = nodes[int(rng.integers(len(nodes)))]
            b = nodes[int(rng.integers(len(nodes)))]
            if a == b and not g.loops:
                continue
            link = key(a, b)
            if link in where:
                continue
            if a in protected and b in protected:
                report.skipped += 1
                continue
            g.set_link(a, b, True)
            where[link] = len(links)
            links.append(link)
            added += 1
            report.toggled += 1
        if not is_community(g, community.members):
            report.invariant_violations += 1
        report.steps += 1
    return report
