"""
Finding community members with a keyed filter
=============================================

Receivers do not get a member list.  They get a Bloom filter keyed by
the third hash-chain seed and test each profile in the carrier against
it.  Here the measured false-positive rate is compared with the usual
estimate at a few loads.
"""

import numpy as np

from ccct import MasterKey, Nonce, bloom_build, derive_seeds

key, nonce = MasterKey.generate(), Nonce.generate()
seed = derive_seeds(nonce, key).bloom_seed
rng = np.random.default_rng(0)

for load in (1_000, 10_000, 50_000):
    raw = np.unique(rng.integers(0, 2**48, 2 * (load + 20_000), dtype=np.uint64))[: load + 20_000]
    keys = [int(x).to_bytes(6, "big") for x in raw]
    f = bloom_build(keys[:load], seed)
    missed = int((~f.query_many(keys[:load])).sum())
    fp = float(f.query_many(keys[load:]).mean())
    print(f"load {load:>6}: missed {missed}, false positives {fp:.4f}, "
          f"estimate {f.expected_fp_rate():.3g}, fill {f.fill_ratio():.3f}")

# the same members inserted under another key land on different bits
small = bloom_build(keys[:1000], seed)
other = bloom_build(keys[:1000], derive_seeds(nonce, MasterKey.generate()).bloom_seed)
shared = (small.bits & other.bits).sum() / small.bits.sum()
print(f"set bits shared with another key's filter: {shared:.3f} (chance level {other.fill_ratio():.3f})")
print("serialized size:", len(f.to_bytes()), "bytes")
