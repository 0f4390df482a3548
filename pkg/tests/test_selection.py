import hashlib
from math import sqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccct.errors import CapacityError, InvalidArgument
from ccct.graphcore import CommunityDescriptor
from ccct.keychain import derive_seeds
from ccct.selection import SubCommunity, decimate, select_subcommunity, selection_agreement


def _oracle_select(members, s, seed):
    """Independent decimation: repeated passes over the unkept members."""
    stream = ""
    j = 0
    pool = sorted(members)
    kept = []
    pos = 0
    while len(kept) < s:
        nxt = []
        for v in pool:
            if len(kept) == s:
                break
            while pos >= len(stream):
                stream += "".join(f"{b:08b}" for b in hashlib.sha256(seed + j.to_bytes(8, "big")).digest())
                j += 1
            if stream[pos] == "1":
                kept.append(v)
            else:
                nxt.append(v)
            pos += 1
        pool = nxt
    return sorted(kept)


def test_all_ones_takes_the_prefix():
    members = list(range(10, 30))
    assert decimate(members, 5, iter([1] * 100)) == members[:5]


def test_all_zeros_exhausts():
    with pytest.raises(InvalidArgument):
        decimate(list(range(10)), 3, iter([0] * 1000))


def test_wrap_around_pass():
    # first pass keeps 2 and 4; second pass over 1, 3 keeps 3
    assert decimate([1, 2, 3, 4], 3, iter([0, 1, 0, 1, 0, 1])) == [2, 3, 4]


def test_golden_desk_scale_subset(key, nonce):
    seeds = derive_seeds(nonce, key)
    members = list(range(1000, 1000 + 357 * 3, 3))
    sub = select_subcommunity(CommunityDescriptor(members), 237, seeds.sel_seed)
    assert list(sub) == _oracle_select(members, 237, seeds.sel_seed)
    assert len(sub) == 237
    assert hashlib.sha256(repr(list(sub)).encode()).hexdigest()[:16] == "79bf341b75c2fd2e"


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(0, 10**6), min_size=1, max_size=120), st.data(), st.binary(min_size=32, max_size=32))
def test_selection_properties(members, data, seed):
    s = data.draw(st.integers(1, len(members)))
    sub = select_subcommunity(members, s, seed)
    assert len(sub) == s
    assert set(sub) <= members
    assert list(sub) == sorted(sub)
    assert list(sub) == _oracle_select(members, s, seed)
    assert select_subcommunity(members, s, seed) == sub


def test_whole_community_when_s_equals_size():
    assert list(select_subcommunity(range(9), 9, bytes(32))) == list(range(9))


def test_size_errors():
    with pytest.raises(CapacityError):
        select_subcommunity(range(5), 6, bytes(32))
    with pytest.raises(InvalidArgument):
        select_subcommunity(range(5), 0, bytes(32))
    with pytest.raises(InvalidArgument):
        SubCommunity((3, 2))


def test_overlap_of_independent_keys_is_binomial():
    s = 100
    community = list(range(2 * s))
    trials = 100
    overlaps = [
        selection_agreement(community, s, hashlib.sha256(b"a%d" % t).digest(), hashlib.sha256(b"b%d" % t).digest())
        for t in range(trials)
    ]
    mean = sum(overlaps) / trials
    sigma_mean = sqrt(s / 4) / sqrt(trials)
    assert abs(mean - s / 2) <= 5 * sigma_mean


def test_agreement_edge_cases():
    seed = bytes(range(32))
    assert selection_agreement(range(50), 20, seed, seed) == 20
    assert selection_agreement(range(20), 20, bytes(32), seed) == 20
