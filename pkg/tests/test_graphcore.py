from fractions import Fraction
from math import floor, log10

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import blank_graph
from ccct.errors import FormatError, GraphError, InvalidArgument
from ccct.graphcore import (AttributeDictionary, AttributeVector, SocialGraph, attribute_pattern_count,
                            bell_number, density, is_community, log2_int)

FIG1_ARCS = [(1, 2), (1, 3), (1, 5), (2, 4), (4, 3), (5, 3), (5, 4), (6, 4)]
FIG1_EDGES = [(1, 2), (1, 3), (1, 5), (2, 4), (3, 4), (3, 5), (4, 5), (4, 6)]


def _graph(links, directed):
    g = blank_graph(range(1, 7), directed=directed)
    for a, b in links:
        g.set_link(a, b, True)
    return g


def test_density_small_examples():
    dg, ug = _graph(FIG1_ARCS, True), _graph(FIG1_EDGES, False)
    assert density(dg) == Fraction(8, 36)
    assert density(ug) == Fraction(8, 15)
    assert density(dg, [1, 2, 3, 4]) == Fraction(4, 16)
    assert density(ug, [1, 2, 3, 4]) == Fraction(4, 6)


def test_density_with_loops_counts_self_slots():
    g = blank_graph(range(3), loops=True)
    g.set_link(0, 0, True)
    g.set_link(0, 1, True)
    assert density(g) == Fraction(2, 6)


def test_density_errors():
    g = blank_graph([1])
    with pytest.raises(InvalidArgument):
        density(g, [])
    with pytest.raises(InvalidArgument):
        density(g)


def test_is_community():
    ug = _graph(FIG1_EDGES, False)
    assert is_community(ug, [3, 4, 5])
    assert not is_community(ug, [1, 6])
    with pytest.raises(GraphError):
        is_community(ug, [1, 99])


def test_loops_forbidden_by_default():
    g = blank_graph([1, 2])
    with pytest.raises(GraphError):
        g.set_link(1, 1, True)
    with pytest.raises(GraphError):
        g.set_link(1, 3, True)


def test_node_ids_are_never_reused():
    g = SocialGraph()
    a = g.add_node()
    b = g.add_node()
    g.remove_node(b)
    assert g.add_node() not in (a, b)


link_ops = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7), st.booleans()), max_size=80)


@settings(max_examples=100, deadline=None)
@given(link_ops, st.booleans(), st.booleans())
def test_set_link_model(ops, directed, loops):
    g = blank_graph(range(8), directed=directed, loops=loops)
    model = set()
    for a, b, present in ops:
        if a == b and not loops:
            continue
        key = (a, b) if directed else (min(a, b), max(a, b))
        before = set(g.links())
        changed = g.set_link(a, b, present)
        assert changed == ((key in model) != present)
        (model.add if present else model.discard)(key)
        assert g.has_link(a, b) == present
        # only the touched link may differ
        assert set(g.links()) ^ before <= {key}
    assert set(g.links()) == model
    assert g.number_of_links() == g.count_links_from_scratch() == len(model)


@settings(max_examples=50, deadline=None)
@given(link_ops, st.booleans(), st.sets(st.integers(0, 7), min_size=2))
def test_induced_count_matches_subgraph(ops, directed, subset):
    g = blank_graph(range(8), directed=directed, loops=True)
    for a, b, present in ops:
        g.set_link(a, b, present)
    assert g.induced_link_count(subset) == g.subgraph(subset).number_of_links()


@settings(max_examples=50, deadline=None)
@given(link_ops, st.booleans(), st.booleans())
def test_canonical_text_round_trip(ops, directed, loops):
    g = blank_graph(range(8), directed=directed, loops=loops, n_attributes=5)
    g.set_attributes(3, AttributeVector.from_features([1, 4], 5))
    for a, b, present in ops:
        if a != b or loops:
            g.set_link(a, b, present)
    text = g.canonical_text()
    assert SocialGraph.from_canonical_text(text).canonical_text() == text


def test_canonical_text_rejects_garbage():
    with pytest.raises(FormatError):
        SocialGraph.from_canonical_text("N 1 -\n")
    with pytest.raises(FormatError):
        SocialGraph.from_canonical_text("G undirected noloops 0\nX 1\n")


def test_attribute_vector_bit_order():
    v = AttributeVector.from_features([1, 3], 10)
    assert v.bitstring() == "1010000000"
    assert v[1] == 1 and v[2] == 0
    assert v.to_bytes() == (0b1010000000).to_bytes(2, "big")
    assert AttributeVector.from_hex(v.hex(), 10) == v
    with pytest.raises(InvalidArgument):
        AttributeVector.from_features([11], 10)


def test_attribute_dictionary_validation():
    d = AttributeDictionary.from_names(["url", "frog"])
    assert AttributeDictionary.from_json(d.to_json()) == d
    with pytest.raises(InvalidArgument):
        AttributeDictionary.from_names(["a", "a"])


def _partitions(items):
    """Every set partition of ``items`` by direct recursive construction."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


@pytest.mark.parametrize("m", range(0, 9))
def test_bell_matches_enumeration(m):
    assert bell_number(m) == sum(1 for _ in _partitions(list(range(m))))


def test_bell_55_magnitude():
    b55 = bell_number(55)
    assert floor(log2_int(b55)) in {176, 177, 178}
    assert floor(log10(b55)) in {52, 53, 54}
    assert b55.bit_length() - 1 == floor(log2_int(b55))


def test_profile_count_is_exact_power():
    big = attribute_pattern_count(300)
    acc, base, e = 1, 2, 300
    while e:
        if e & 1:
            acc *= base
        base *= base
        e >>= 1
    assert big == acc
    assert log2_int(big) == 300


def test_complete_graph_density_is_one():
    for directed in (False, True):
        g = blank_graph(range(5), directed=directed)
        for a in range(5):
            for b in range(5):
                if a != b:
                    g.set_link(a, b, True)
        # directed graphs count n^2 slots, so without loops the maximum is (n-1)/n
        assert density(g) == (Fraction(4, 5) if directed else 1)


def test_community_predicate_edge_cases():
    ug = _graph(FIG1_EDGES, False)
    assert is_community(ug, [1, 2, 3, 4])
    assert not is_community(ug, ug.nodes())
    assert not is_community(ug, [2, 3, 6])


def test_link_set_semantics():
    g = blank_graph([1, 2])
    assert g.set_link(1, 2, True)
    assert not g.set_link(1, 2, True)
    assert g.number_of_links() == 1
    assert g.has_link(2, 1)


def test_small_counts():
    assert attribute_pattern_count(0) == 1
    assert attribute_pattern_count(10) == 1024
    assert [bell_number(m) for m in (0, 1, 3)] == [1, 1, 5]
