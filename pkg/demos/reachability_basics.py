"""
Path queries on a small almost-tree
===================================

A path query asks whether one vertex can reach another. This walk-through
builds a 7-vertex almost-tree by hand, looks at its reachability matrix, and
shows how an oracle charges for every question it answers.
"""

# %%
# The hidden graph: a rooted tree plus the edge 3 -> 5, so vertex 5 has two
# parents (2 and 3).
import numpy as np

from pathquery import DirectedGraph, QueryOracle, validate_almost_tree
from pathquery.graph import closure_matrix

tree = {(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6)}
g = DirectedGraph(7, frozenset(tree | {(3, 5)}), root=0)
print(validate_almost_tree(g))

# %%
# Row u of the closure lists every vertex u reaches. Every vertex reaches
# itself.
print(closure_matrix(g).astype(int))

# %%
# Adding 3 -> 5 changes the answer for (3, 6): 3 now reaches 6 through 5.
plain = DirectedGraph(7, frozenset(tree), root=0)
changed = np.argwhere(closure_matrix(g) != closure_matrix(plain))
print("pairs whose answer changed:", [tuple(p) for p in changed.tolist()])

# %%
# A learner only sees the graph through an oracle. Each call is counted
# under a phase label, repeats included.
o = QueryOracle(g, record=True)
print(o.query(3, 6, "probe"), o.query(4, 0, "probe"), o.query(3, 6, "probe"))
print("total", o.total_queries, "distinct", o.distinct_queries)

# %%
# A relative view gives the descendants and ancestors of one vertex inside a
# working set, at two queries per other member.
view = o.relative_view(1, range(7), "view")
print("D(1) =", sorted(view.descendants), " A(1) =", sorted(view.ancestors))
print(dict(o.per_phase))
print("\n".join(o.transcript_lines()[:5]))
