"""
How many bits fit on a sub-community
====================================

Capacity grows quadratically with the number of encoding members.  The
table below prints it for the four graph modes together with the number
of distinct attribute profiles and set partitions, which bound how hard
the community is to find without the key.
"""

import numpy as np

from ccct import GraphMode, capacity
from ccct.graphcore import attribute_pattern_count, bell_number, log2_int

sizes = [10, 100, 237, 1000, 5000]
print(f"{'s':>6} " + " ".join(f"{m.name:>18}" for m in GraphMode.all()))
for s in sizes:
    print(f"{s:>6} " + " ".join(f"{capacity(m, s):>18,}" for m in GraphMode.all()))

# bits per member flattens out near s/2 (undirected) or s (directed)
s = np.array(sizes)
print("undirected bits per member:", np.round([capacity(GraphMode(False, False), int(x)) / x for x in s], 1))

for n in (48, 64, 300):
    print(f"{n} binary attributes -> 2^{log2_int(attribute_pattern_count(n)):.0f} profiles")
b = bell_number(55)
print(f"partitions of 55 attributes: about 2^{log2_int(b):.1f} ({len(str(b))} decimal digits)")
