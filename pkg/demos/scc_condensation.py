"""
Components and condensation with O(nk) queries
==============================================

Inside a strongly connected component every vertex reaches every other, so
path queries cannot tell which edges are there. What they do pin down is
the partition into components and, if no edge between components is
transitive, the edges of the condensation.
"""

# %%
from pathquery import GenSpec, QueryOracle, generate, learn_scc, strongly_connected_components
from pathquery.scc import query_budget

g, meta = generate(GenSpec("scc", n=200, k=12, seed=3))
truth = strongly_connected_components(g)
print("component sizes:", sorted(len(c) for c in truth.components))

# %%
o = QueryOracle(g)
learned = learn_scc(o)
print("same partition and condensation:", learned.same_as(truth))
print("condensation edges:", len(learned.condensation_edges))
print("queries:", dict(o.per_phase), " budget 2nk + k^2 =", query_budget(200, 12))

# %%
# The cost is linear in n for fixed k, and grows with k.
for k in (1, 4, 16, 64):
    h, _ = generate(GenSpec("scc", n=400, k=k, seed=1))
    o = QueryOracle(h)
    learn_scc(o)
    print(f"k={k:3d}  queries={o.total_queries:7d}  queries/(n k)={o.total_queries / (400 * k):.2f}")
