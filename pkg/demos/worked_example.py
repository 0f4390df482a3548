"""
Writing 36 bits into a small community
======================================

A 36-bit ciphertext is stored in the links of a 9-member undirected
community, then in a 7-member directed one.  The trivial link order is
used so the result can be read off by hand.
"""

from ccct import GraphMode, SocialGraph, decode, encode, trivial_order

payload = "110100100011100100101011010011101011"

# undirected: 9 * 8 / 2 = 36 candidate links
g = SocialGraph(directed=False)
for v in range(1, 10):
    g.add_node(node_id=v)
order = trivial_order(range(1, 10), GraphMode(False, False))
encode(g, order, payload)
print("undirected links:", sorted(g.links()))
print("decoded:", decode(g, order))

# directed: 7 * 6 = 42 candidate arcs, the last 6 stay absent
d = SocialGraph(directed=True)
for v in range(1, 8):
    d.add_node(node_id=v)
order = trivial_order(range(1, 8), GraphMode(True, False))
encode(d, order, payload)
print("directed arcs:", sorted(d.links()))
print("decoded:", decode(d, order, len(payload)))
