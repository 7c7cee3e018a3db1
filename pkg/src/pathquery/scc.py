"""Learn strongly connected components and their condensation from path queries.

Partition recovery keeps one representative per discovered component and
tests each new vertex against the representatives in discovery order, so it
spends at most ``2nk`` queries. Condensation edges then cost one query per
ordered pair of components; under the promise that no cross-component edge
is transitive, the reduced representative reachability is exactly the set
of component pairs joined by an edge.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import PromiseViolation
from .graph import Edge, SccPartition, _reduce_dag
from .oracle import QueryOracle


def learn_partition(
    o: QueryOracle,
    n: int | None = None,
    order: Iterable[int] | None = None,
    phase: str = "partition",
) -> list[frozenset[int]]:
    """Components in order of discovery; ``order`` overrides the vertex scan order."""
    n = o.n if n is None else n
    reps: list[int] = []
    members: list[list[int]] = []
    for v in range(n) if order is None else order:
        for idx, r in enumerate(reps):
            if o.query(v, r, phase) and o.query(r, v, phase):
                members[idx].append(v)
                break
        else:
            reps.append(v)
            members.append([v])
    return [frozenset(m) for m in members]


def learn_condensation(
    o: QueryOracle, components: Sequence[frozenset[int]], phase: str = "condensation"
) -> frozenset[Edge]:
    """Reduced component-level reachability, as pairs of indices into ``components``."""
    k = len(components)
    reps = [min(c) for c in components]
    reach: set[Edge] = set()
    for i in range(k):
        for j in range(k):
            if i != j and o.query(reps[i], reps[j], phase):
                if (j, i) in reach:
                    raise PromiseViolation(
                        f"components {i} and {j} reach each other; the partition is not maximal"
                    )
                reach.add((i, j))
    return _reduce_dag(k, reach)


def learn_scc(o: QueryOracle, order: Iterable[int] | None = None) -> SccPartition:
    components = learn_partition(o, order=order)
    return SccPartition(tuple(components), learn_condensation(o, components))


def query_budget(n: int, k: int) -> int:
    return 2 * n * k + k * k
