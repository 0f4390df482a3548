import json
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import blank_graph
from ccct.errors import CapacityError, FormatError, InvalidArgument
from ccct.hyperlayer import (Hypergraph, build_plan, decode_multi, encode_multi, incidence, load_plan_file,
                             meta_graph, meta_view, select_plan)
from ccct.linkcodec import Ciphertext, GraphMode

UND = GraphMode(False, False)

# four overlapping communities on nodes 1..16
EDGES = [{1, 2, 3, 4, 5, 6}, {3, 6, 7, 8, 11}, {8, 9, 10, 11, 12}, {8, 13, 14, 15, 16}]
SUBS = [[1, 2, 3, 4, 5], [6, 7, 8], [9, 10, 11, 12], [13, 14, 15, 16]]
PAYLOADS = ["1111011111", "111", "101111", "111111", "100110"]
BRIDGES = {(0, 1): (1, 6), (0, 2): (1, 8), (0, 3): (1, 13), (1, 2): (3, 8), (1, 3): (3, 13), (2, 3): (8, 13)}


def _oracle_links(edges, subs, payloads):
    """Expected carrier links by direct enumeration."""
    links = set()
    for sub, bits in zip(subs, payloads):
        for pair, b in zip(combinations(sorted(sub), 2), bits):
            if b == "1":
                links.add(pair)
    owner = {v: k for k, sub in enumerate(subs) for v in sub}
    used = []
    for (i, j), b in zip(combinations(range(len(edges)), 2), payloads[-1]):
        for u in sorted(edges[i]):
            done = False
            for v in sorted(edges[j]):
                pair = (min(u, v), max(u, v))
                if u == v or pair in used or (u in owner and owner.get(v) == owner[u]):
                    continue
                used.append(pair)
                if b == "1":
                    links.add(pair)
                done = True
                break
            if done:
                break
    return links, used


def test_hypergraph_basics():
    h = Hypergraph.from_edges(EDGES)
    assert h.order == 16 and h.size == 4
    assert incidence(h, 0, 1) and not incidence(h, 0, 2)
    assert h.adjacent(3, 11) and not h.adjacent(1, 16)
    with pytest.raises(InvalidArgument):
        Hypergraph({1}, [{2}])
    with pytest.raises(InvalidArgument):
        Hypergraph({1}, [set()])


def test_meta_graph_forbids_self_links():
    mg = meta_graph(Hypergraph.from_edges(EDGES))
    assert len(mg.possible_links()) == 6
    with pytest.raises(InvalidArgument):
        mg.set_link(2, 2)


def test_four_community_five_payloads():
    h = Hypergraph.from_edges(EDGES)
    plan = build_plan(h, SUBS, UND)
    assert plan.capacities == [10, 3, 6, 6, 6]
    assert plan.bridges == BRIDGES
    g = blank_graph(range(1, 17))
    encode_multi(plan, g, PAYLOADS)
    expected, bridges = _oracle_links(EDGES, SUBS, PAYLOADS)
    assert bridges == [BRIDGES[p] for p in sorted(BRIDGES)]
    assert set(g.links()) == expected
    assert [str(c) for c in decode_multi(plan, g)] == PAYLOADS
    assert meta_view(plan, g).links == {(0, 1), (1, 2), (1, 3)}


def test_levels_are_isolated():
    h = Hypergraph.from_edges(EDGES)
    plan = build_plan(h, SUBS, UND)
    g = blank_graph(range(1, 17))
    encode_multi(plan, g, PAYLOADS)
    changed = list(PAYLOADS)
    changed[2] = "010000"
    encode_multi(plan, g, changed)
    out = [str(c) for c in decode_multi(plan, g)]
    assert out == changed


def test_overlapping_subcommunities_rejected():
    h = Hypergraph.from_edges(EDGES)
    with pytest.raises(InvalidArgument):
        build_plan(h, [[1, 2, 3], [3, 6, 7], [9, 10], [13, 14]], UND)
    with pytest.raises(InvalidArgument):
        build_plan(h, [[1, 2], [6, 9], [10, 11], [13, 14]], UND)


def test_payload_count_and_capacity_checks():
    plan = build_plan(Hypergraph.from_edges(EDGES), SUBS, UND)
    g = blank_graph(range(1, 17))
    with pytest.raises(InvalidArgument):
        encode_multi(plan, g, PAYLOADS[:4])
    too_long = list(PAYLOADS)
    too_long[1] = "1111"
    with pytest.raises(CapacityError) as err:
        encode_multi(plan, g, too_long)
    assert err.value.level == 1


@st.composite
def random_plans(draw):
    k = draw(st.integers(2, 5))
    nodes = list(range(60))
    subs, edges, used = [], [], set()
    for _ in range(k):
        size = draw(st.integers(2, 6))
        free = [v for v in nodes if v not in used]
        sub = draw(st.lists(st.sampled_from(free), min_size=size, max_size=size, unique=True))
        used |= set(sub)
        extra = draw(st.sets(st.sampled_from(nodes), max_size=5))
        subs.append(sorted(sub))
        edges.append(set(sub) | extra)
    return edges, subs


@settings(max_examples=200, deadline=None)
@given(random_plans(), st.sampled_from(GraphMode.all()), st.binary(min_size=32, max_size=32), st.data())
def test_random_plans_round_trip(geometry, mode, seed, data):
    edges, subs = geometry
    h = Hypergraph.from_edges(edges)
    plan = build_plan(h, subs, mode, perm_seed=seed)
    payloads = [data.draw(st.lists(st.integers(0, 1), max_size=cap)) for cap in plan.capacities]
    g = blank_graph(range(60), directed=mode.directed, loops=mode.loops)
    encode_multi(plan, g, payloads)
    out = decode_multi(plan, g, [len(p) for p in payloads])
    assert [list(c.bits) for c in out] == payloads


def test_keyed_plan_selects_disjoint_members():
    h = Hypergraph.from_edges(EDGES)
    plan = select_plan(h, [4, 2, 3, 3], UND, bytes(32), bytes(range(32)))
    seen = set()
    for level, edge in zip(plan.levels, h.hyperedges):
        assert set(level.sub) <= edge
        assert not seen & set(level.sub)
        seen |= set(level.sub)
    with pytest.raises(CapacityError):
        select_plan(h, [6, 5, 3, 3], UND, bytes(32), bytes(32))


def test_plan_file(tmp_path):
    spec = {"mode": "undirected",
            "communities": [{"hyperedge": sorted(e), "members": s, "payload": f"c{i}.bin", "bits": len(p)}
                            for i, (e, s, p) in enumerate(zip(EDGES, SUBS, PAYLOADS))],
            "meta": {"payload": "meta.bin", "bits": 6}}
    (tmp_path / "plan.json").write_text(json.dumps(spec))
    h, chosen, mode, paths, bits = load_plan_file(tmp_path / "plan.json")
    assert chosen == SUBS and mode == UND and bits == [10, 3, 6, 6, 6]
    assert paths[-1] == tmp_path / "meta.bin"
    (tmp_path / "bad.json").write_text(json.dumps({"communities": [{"hyperedge": [1]}]}))
    with pytest.raises(FormatError):
        load_plan_file(tmp_path / "bad.json")


def test_incidence_and_meta_graph_edge_cases():
    h = Hypergraph.from_edges(EDGES)
    assert incidence(h, 0, 1) and incidence(h, 2, 2)
    assert meta_graph(Hypergraph.from_edges(EDGES)).nodes == [0, 1, 2, 3]
    assert meta_graph(Hypergraph.from_edges([])).nodes == []
    single = meta_graph(Hypergraph.from_edges([{1, 2}]))
    assert single.nodes == [0] and single.possible_links() == []


def test_empty_payloads_set_no_links():
    plan = build_plan(Hypergraph.from_edges(EDGES), SUBS, UND)
    g = blank_graph(range(1, 17))
    encode_multi(plan, g, [""] * 5)
    assert g.number_of_links() == 0


def test_single_community_reduces_to_link_codec():
    from ccct.linkcodec import encode, trivial_order

    h = Hypergraph.from_edges([{1, 2, 3, 4}])
    plan = build_plan(h, [[1, 2, 3, 4]], UND)
    a, b = blank_graph(range(1, 5)), blank_graph(range(1, 5))
    encode_multi(plan, a, ["101101", ""])
    encode(b, trivial_order([1, 2, 3, 4], UND), "101101")
    assert a.canonical_text() == b.canonical_text()


def test_permuting_communities_permutes_payloads():
    order = [2, 0, 3, 1]
    h = Hypergraph.from_edges(EDGES)
    plan = build_plan(h, SUBS, UND)
    g = blank_graph(range(1, 17))
    encode_multi(plan, g, PAYLOADS)
    swapped = build_plan(Hypergraph.from_edges([EDGES[i] for i in order]), [SUBS[i] for i in order], UND)
    out = decode_multi(swapped, g, [len(PAYLOADS[i]) for i in order] + [0])
    assert [str(c) for c in out[:4]] == [PAYLOADS[i] for i in order]


def test_full_capacity_random_instance():
    import numpy as np

    rng = np.random.default_rng(4)
    nodes = rng.permutation(200).tolist()
    subs = [sorted(nodes[i * 10:(i + 1) * 10]) for i in range(4)]
    edges = [set(s) | set(rng.choice(200, 5).tolist()) for s in subs]
    plan = build_plan(Hypergraph.from_edges(edges), subs, GraphMode(True, True), perm_seed=bytes(32))
    payloads = [Ciphertext.random(cap, rng) for cap in plan.capacities]
    g = blank_graph(range(200), directed=True, loops=True)
    encode_multi(plan, g, payloads)
    assert decode_multi(plan, g) == payloads
