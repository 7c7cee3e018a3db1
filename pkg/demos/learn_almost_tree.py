"""
Reconstructing an almost-tree from path queries
===============================================

The learner first recovers a spanning tree of true edges by splitting the
vertex set along balanced edges, then scans that tree for the one edge it
is missing. Here it runs on a random instance, and the phase counters show
where the queries went.
"""

# %%
from pathquery import GenSpec, QueryOracle, generate, reconstruct_rooted_graph

spec = GenSpec("almost_tree", n=300, d=3, seed=42)
hidden, meta = generate(spec)
print("hidden extra edge:", meta["extra_edge"], " height:", meta["h"])

# %%
o = QueryOracle(hidden, seed=7)
rec = reconstruct_rooted_graph(o, d=3)
print("exact:", rec.graph.edges == hidden.edges)
print("cross edge found:", rec.cross_edge)

# %%
# If the layered tree happened to use the extra edge as the head's parent
# edge, the cross edge reported is the other in-edge. Both are true edges,
# and the union is the same.
head = meta["extra_edge"][1]
print("parents of", head, ":", hidden.predecessors[head])

# %%
# Queries by phase. The search and parent lookups inside the recursive
# splitting dominate. The cross-edge scan grows with n times the height.
for phase, count in sorted(o.per_phase.items()):
    print(f"{phase:18s} {count:7d}")
print(f"{'total':18s} {o.total_queries:7d}")
print("searches", rec.stats.searches, "failed searches", rec.stats.retries,
      "max recursion depth", rec.stats.max_depth)

# %%
# A plain tree goes through the same learner. The scan finds no witness
# and nothing is added.
tree, _ = generate(GenSpec("tree", n=300, d=3, seed=42))
rec = reconstruct_rooted_graph(QueryOracle(tree, seed=7), d=3)
print("tree exact:", rec.graph.edges == tree.edges, " cross edge:", rec.cross_edge)
