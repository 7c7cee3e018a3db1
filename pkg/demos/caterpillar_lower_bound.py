"""
Why caterpillars need quadratically many queries
================================================

Take a caterpillar, a spine with one leg hanging off each spine vertex, and
add one edge from leg i to a later leg j. Exactly one path-query answer
changes. An algorithm that has not asked that exact pair cannot tell the
two graphs apart, and there are about n^2/8 candidate pairs.
"""

# %%
import numpy as np

from pathquery import QueryOracle, reconstruct_rooted_graph
from pathquery.generators import caterpillar
from pathquery.graph import closure_matrix

n = 16
plain = caterpillar(n)
marked = caterpillar(n, legs=(2, 5))
diff = np.argwhere(closure_matrix(marked) != closure_matrix(plain))
print("vertices:", plain.n, " differing answers:", [tuple(p) for p in diff.tolist()])
# leg v_(n/2+i) is vertex n/2 + i - 1
print("expected:", (n // 2 + 2 - 1, n // 2 + 5 - 1))

# %%
# The learner still recovers the edge. On a spine this long the ancestor
# chains are long too, so the parent lookups during splitting grow as n^2.
for size in (64, 128, 256):
    g = caterpillar(size, legs=(size // 4, size // 2 - 2))
    o = QueryOracle(g, seed=0)
    rec = reconstruct_rooted_graph(o, d=3)
    print(f"n={size:4d}  exact={rec.graph.edges == g.edges}  total={o.total_queries:7d}  "
          f"layered={o.phase_total('layered'):7d}  cross={o.phase_total('cross'):6d}  total/n^2={o.total_queries / size**2:.2f}")
