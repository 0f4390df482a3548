"""
Five payloads on four overlapping communities
=============================================

Each community carries its own payload on its encoding members; a fifth
payload rides on one bridge link per pair of communities.
"""

from ccct import GraphMode, SocialGraph
from ccct.hyperlayer import Hypergraph, build_plan, decode_multi, encode_multi, meta_view

h = Hypergraph.from_edges([
    {1, 2, 3, 4, 5, 6},
    {3, 6, 7, 8, 11},
    {8, 9, 10, 11, 12},
    {8, 13, 14, 15, 16},
])
plan = build_plan(h, [[1, 2, 3, 4, 5], [6, 7, 8], [9, 10, 11, 12], [13, 14, 15, 16]], GraphMode(False, False))
print("capacities:", plan.capacities)
print("bridges:", plan.bridges)

g = SocialGraph()
for v in range(1, 17):
    g.add_node(node_id=v)
payloads = ["1111011111", "111", "101111", "111111", "100110"]
encode_multi(plan, g, payloads)
print("decoded:", [str(c) for c in decode_multi(plan, g)])
print("community-level links present:", sorted(meta_view(plan, g).links))
