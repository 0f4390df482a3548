import hashlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import blank_graph
from ccct.errors import FormatError, InvalidArgument
from ccct.graphcore import AttributeVector
from ccct.membership import (BloomFilter, bloom_build, bloom_deserialize, bloom_query, bloom_serialize,
                             function_seeds, validated_members)
from ccct.murmur import murmur3_x64_128

SEED = hashlib.sha256(b"bloom").digest()


def distinct_keys(rng, count, width=6):
    raw = np.unique(rng.integers(0, 2**48, count * 2, dtype=np.uint64))
    rng.shuffle(raw)
    return [int(x).to_bytes(width, "big") for x in raw[:count]]


def test_positions_follow_the_scalar_hash():
    bf = BloomFilter(SEED, size=1 << 12, hashes=5)
    key = b"\x01\x02\x03"
    seeds = [int.from_bytes(hashlib.sha256(SEED + j.to_bytes(4, "big")).digest()[:4], "big")
             for j in range(1, 6)]
    assert list(function_seeds(SEED, 5)) == seeds
    expected = [murmur3_x64_128(key, s)[0] % (1 << 12) for s in seeds]
    assert list(bf.positions([key])[:, 0]) == expected


@settings(max_examples=30, deadline=None)
@given(st.lists(st.binary(min_size=1, max_size=12), max_size=40))
def test_no_false_negatives_small(items):
    bf = bloom_build(items, SEED, size=1 << 14, hashes=8)
    assert all(bloom_query(bf, it) for it in items)


@pytest.mark.parametrize("load", [1_000, 10_000, 50_000])
def test_loads_no_false_negatives_and_fp_rate(load):
    rng = np.random.default_rng(load)
    keys = distinct_keys(rng, load + 100_000)
    members, probes = keys[:load], keys[load:]
    bf = bloom_build(members, SEED)
    assert bf.query_many(members).all()
    measured = bf.query_many(probes).mean()
    expected = bf.expected_fp_rate()
    if expected * len(probes) < 1:
        # an event this rare should not appear at all in 10^5 probes
        assert measured == 0
    else:
        assert expected / 2 <= measured <= expected * 2


def test_serialization_round_trip(tmp_path):
    bf = bloom_build([b"a", b"b"], SEED, size=1 << 10, hashes=4)
    data = bloom_serialize(bf)
    assert len(data) == 8 + 8 + 4 + 32 + 8 + (1 << 10) // 8
    back = bloom_deserialize(data)
    assert np.array_equal(back.bits, bf.bits)
    assert (back.seed, back.size, back.hashes, back.count) == (SEED, 1 << 10, 4, 2)
    bf.save(tmp_path / "f")
    assert BloomFilter.load(tmp_path / "f").digest() == bf.digest()


def test_default_serialized_size():
    bf = BloomFilter(SEED)
    assert len(bf.to_bytes()) == 60 + (1 << 20) // 8


@pytest.mark.parametrize("mangle", [
    lambda d: d[:-1],
    lambda d: d[:20],
    lambda d: b"NOTBLOOM" + d[8:],
])
def test_corrupt_payloads(mangle):
    data = bloom_build([b"x"], SEED, size=64, hashes=2).to_bytes()
    with pytest.raises(FormatError):
        bloom_deserialize(mangle(data))


def test_bad_parameters():
    with pytest.raises(InvalidArgument):
        BloomFilter(b"short")
    with pytest.raises(InvalidArgument):
        BloomFilter(SEED, size=12)
    with pytest.raises(InvalidArgument):
        BloomFilter(SEED, hashes=0)


def test_seed_changes_positions():
    a = BloomFilter(SEED, 1 << 16, 8).positions([b"k"])
    b = BloomFilter(hashlib.sha256(b"other").digest(), 1 << 16, 8).positions([b"k"])
    assert not np.array_equal(a, b)


def test_validated_members_on_graph():
    g = blank_graph(range(1, 6), n_attributes=4)
    for v in (2, 4):
        g.set_attributes(v, AttributeVector.from_features([v], 4))
    bf = bloom_build([g.attributes(2), g.attributes(4)], SEED, size=1 << 12, hashes=6)
    assert validated_members(g, bf) == [2, 4]


def test_empty_and_single_member_filters():
    empty = bloom_build([], SEED)
    assert not empty.bits.any()
    assert b"anything" not in empty
    single = bloom_build([b"one"], SEED)
    assert 0 < single.bits.sum() <= 64


def test_different_seeds_disagree_on_non_members():
    rng = np.random.default_rng(3)
    keys = distinct_keys(rng, 60_000)
    a = bloom_build(keys[:50_000], SEED)
    b = bloom_build(keys[:50_000], hashlib.sha256(b"other").digest())
    qa, qb = a.query_many(keys[50_000:]), b.query_many(keys[50_000:])
    # independent filters: both-positive rate near the product of the two rates
    assert abs((qa & qb).mean() - qa.mean() * qb.mean()) < 0.01
    assert (qa != qb).any()
