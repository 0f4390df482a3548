"""
What an observer without the key sees
=====================================

Three quick measurements: how much two independent keys' selections
overlap, how a one-bit key change scrambles the decoded bits, and how
little a keyed link order resembles the trivial one.
"""

import numpy as np

from ccct import Ciphertext, GraphMode, MasterKey, Nonce, SocialGraph
from ccct.pipeline import decode_carrier, encode_carrier
from ccct.selection import selection_agreement

rng = np.random.default_rng(3)

s = 100
overlaps = [selection_agreement(range(2 * s), s, rng.bytes(32), rng.bytes(32)) for _ in range(200)]
print(f"overlap of two selections of {s} from {2 * s}: mean {np.mean(overlaps):.1f}, sd {np.std(overlaps):.1f}")

mode = GraphMode(False, False)
community = list(range(120))
errors = []
for _ in range(50):
    key, nonce = MasterKey(rng.bytes(32)), Nonce(rng.bytes(64))
    g = SocialGraph()
    for v in community:
        g.add_node(node_id=v)
    payload = Ciphertext.random(512, rng)
    encode_carrier(g, key, nonce, payload, mode, 40, community=community)
    wrong = decode_carrier(g, key.flip_bit(int(rng.integers(256))), nonce, 512, mode, 40, community=community)
    errors.append(payload.hamming(wrong) / 512)
print(f"bit error rate with a one-bit key change: {np.mean(errors):.3f}")

from ccct.linkcodec import permuted_order, trivial_order

members = list(range(40))
trivial = trivial_order(members, mode).links
keyed = permuted_order(members, mode, rng.bytes(32)).links
same = sum(a == b for a, b in zip(trivial, keyed))
print(f"keyed order agrees with the trivial order at {same} of {len(trivial)} positions")
