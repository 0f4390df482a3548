"""
A 4 Kb payload in a 1,489-node cover network
============================================

The full send and receive path on a generated network: build the filter,
select 237 of the 357 community members, write the payload, export to
GEXF, re-import, and read it back.  A second run decodes with a key that
differs in one bit.
"""

import sys
import tempfile

import numpy as np

from ccct import Ciphertext, MasterKey, Nonce
from ccct.netsim import DESK_SCALE, run_scenario

key, nonce = MasterKey.generate(), Nonce.generate()
payload = Ciphertext.random(4096, np.random.default_rng(1))

out = tempfile.mkdtemp(prefix="ccc-views-")
report, _, _ = run_scenario(DESK_SCALE, payload, nonce, key, 237, dump_dir=out)
sys.stdout.write(report.to_text())
print("GEXF views written to", out)

report, _, _ = run_scenario(DESK_SCALE, payload, nonce, key, 237, decode_key=key.flip_bit(0))
print("one flipped key bit ->", report.outcome)
