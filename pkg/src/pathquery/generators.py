"""Seeded generators for every hidden-graph family used in the experiments.

Families:

``tree``         random rooted tree with total degree at most ``d``
``almost_tree``  a ``tree`` plus one uniformly drawn reconstructable extra edge
``caterpillar``  spine with one leg per spine vertex and a random leg-to-leg edge
``hybrid``       caterpillar spine ending in a complete ``d``-ary tree, with a
                 random edge from a caterpillar leg to a ``d``-ary leaf
``kary``         complete ``d``-ary tree filled in heap order
``scc``          ``k`` cycles joined by a random reduced DAG of cross edges

The same :class:`GenSpec` (seed included) always produces the same graph.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import GenerationInfeasible
from .graph import DirectedGraph, Edge, _reduce_dag, closure_matrix, height

FAMILIES = ("tree", "almost_tree", "caterpillar", "hybrid", "kary", "scc")


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    d: int = 3
    h: int | None = None
    k: int | None = None
    seed: int = 0
    c: float = 0.25

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


# -- trees --------------------------------------------------------------


def _random_tree(n: int, d: int, rng: np.random.Generator) -> DirectedGraph:
    if n < 1:
        raise ValueError("a tree needs at least one vertex")
    if n >= 2 and d < 2:
        raise ValueError(f"no rooted tree on {n} vertices has max degree {d}")
    degree = [0] * n
    open_slots = [0]  # vertices whose degree is still below d
    edges = []
    for t in range(1, n):
        slot = int(rng.integers(len(open_slots)))
        p = open_slots[slot]
        edges.append((p, t))
        degree[p] += 1
        degree[t] = 1
        if degree[p] >= d:
            open_slots[slot] = open_slots[-1]
            open_slots.pop()
        if degree[t] < d:
            open_slots.append(t)
    # attachment order would leak into vertex ids; shuffle everything but the root
    label = np.concatenate(([0], rng.permutation(np.arange(1, n)))) if n > 1 else np.zeros(1, int)
    return DirectedGraph(n, frozenset((int(label[u]), int(label[v])) for u, v in edges), 0)


def gen_tree(spec: GenSpec) -> DirectedGraph:
    return _random_tree(spec.n, spec.d, np.random.default_rng(spec.seed))


def valid_extra_edges(tree: DirectedGraph, d: int) -> list[Edge]:
    """All edges whose addition keeps ``tree`` a reconstructable almost-tree within degree ``d``.

    The new edge ``(c1, c2)`` gives ``c2`` a second parent; both parents of
    ``c2`` must be incomparable or one of its in-edges becomes transitive
    (or a cycle appears).
    """
    reach = closure_matrix(tree)
    comparable = reach | reach.T
    degree = np.array([tree.degree(u) for u in range(tree.n)])
    spare = degree < d
    out = []
    for c2 in range(tree.n):
        parents = tree.predecessors[c2]
        if len(parents) != 1 or not spare[c2]:
            continue
        p = parents[0]
        for c1 in np.flatnonzero(~comparable[p] & spare).tolist():
            out.append((c1, c2))
    out.sort()
    return out


def add_random_extra_edge(tree: DirectedGraph, d: int, rng: np.random.Generator) -> tuple[DirectedGraph, Edge]:
    candidates = valid_extra_edges(tree, d)
    if not candidates:
        raise GenerationInfeasible(
            "no valid extra edge: every pair with spare degree is comparable through "
            "the second parent (transitive or cycle-creating)"
        )
    edge = candidates[int(rng.integers(len(candidates)))]
    return tree.with_edge(*edge), edge


def gen_almost_tree(spec: GenSpec) -> DirectedGraph:
    return _almost_tree(spec)[0]


def _almost_tree(spec: GenSpec) -> tuple[DirectedGraph, Edge]:
    if spec.n < 4:
        raise ValueError("almost-trees need n >= 4")
    rng = np.random.default_rng(spec.seed)
    tree = _random_tree(spec.n, spec.d, rng)
    return add_random_extra_edge(tree, spec.d, rng)


def gen_kary(spec: GenSpec) -> DirectedGraph:
    """Complete ``d``-ary tree on ``n`` vertices, vertex ``q`` under ``(q - 1) // d``."""
    if spec.n < 1 or spec.d < 1:
        raise ValueError("kary needs n >= 1 and d >= 1")
    return DirectedGraph(spec.n, frozenset(((q - 1) // spec.d, q) for q in range(1, spec.n)), 0)


# -- lower-bound constructions ------------------------------------------


def caterpillar(n: int, legs: tuple[int, int] | None = None) -> DirectedGraph:
    """Caterpillar on ``n - 1`` vertices; ``v_k`` is vertex ``k - 1``.

    Spine ``v_1 -> ... -> v_{n/2}``, leg ``v_{n/2+i}`` under ``v_i``. With
    ``legs=(i, j)`` the edge ``v_{n/2+i} -> v_{n/2+j}`` is added.
    """
    if n % 2 or n < 6:
        raise ValueError("caterpillar needs an even n >= 6")
    m = n // 2
    edges = {(k - 1, k) for k in range(1, m)}
    edges |= {(i - 1, m + i - 1) for i in range(1, m)}
    if legs is not None:
        i, j = legs
        if not 1 <= i < j <= m - 1:
            raise ValueError(f"leg pair must satisfy 1 <= i < j <= {m - 1}")
        edges.add((m + i - 1, m + j - 1))
    return DirectedGraph(n - 1, frozenset(edges), 0)


def _caterpillar(spec: GenSpec) -> tuple[DirectedGraph, tuple[int, int]]:
    if spec.n % 2 or spec.n < 6:
        raise ValueError("caterpillar needs an even n >= 6")
    rng = np.random.default_rng(spec.seed)
    i, j = sorted(int(x) + 1 for x in rng.choice(spec.n // 2 - 1, size=2, replace=False))
    return caterpillar(spec.n, (i, j)), (i, j)


def gen_caterpillar(spec: GenSpec) -> DirectedGraph:
    return _caterpillar(spec)[0]


def _heap_depth(m: int, d: int) -> int:
    depth, filled, level = -1, 0, 1
    while filled < m:
        filled += level
        level *= d
        depth += 1
    return depth


def hybrid_layout(n: int, d: int, h: int, c: float = 0.25) -> tuple[int, int]:
    """Return ``(spine_length, dary_size)`` giving exactly ``n`` vertices and height ``h``.

    The ``d``-ary part shares its root with the last spine vertex.
    """
    if d < 2:
        raise ValueError("hybrid needs d >= 2")
    if c <= 0:
        raise ValueError("c must be positive")
    if not h > (1 + c) * math.log(n, d):
        raise ValueError(f"infeasible: need h > (1+c)*log_d(n) = {(1 + c) * math.log(n, d):.2f}, got h={h}")
    spine = 2
    while True:
        m = n - 2 * spine + 2
        if m < 2:
            raise GenerationInfeasible(f"h={h} is too tall for n={n}: no room left for the d-ary tree")
        reached = spine - 1 + _heap_depth(m, d)
        if reached == h:
            return spine, m
        if reached > h:
            raise GenerationInfeasible(f"h={h} is too short for n={n} with d={d}")
        spine += 1


def _hybrid(spec: GenSpec) -> tuple[DirectedGraph, Edge, dict]:
    if spec.h is None:
        raise ValueError("hybrid needs a target height h")
    s, m = hybrid_layout(spec.n, spec.d, spec.h, spec.c)
    rng = np.random.default_rng(spec.seed)
    edges = {(t - 1, t) for t in range(1, s)}
    legs = list(range(s, 2 * s - 1))
    edges |= {(t, s + t) for t in range(s - 1)}

    def dary(q: int) -> int:
        return s - 1 if q == 0 else 2 * s - 2 + q

    edges |= {(dary((q - 1) // spec.d), dary(q)) for q in range(1, m)}
    leaves = [dary(q) for q in range(1, m) if spec.d * q + 1 >= m]
    extra = (legs[int(rng.integers(len(legs)))], leaves[int(rng.integers(len(leaves)))])
    edges.add(extra)
    meta = {"spine_length": s, "dary_size": m, "leg_leaves": len(legs), "dary_leaves": len(leaves), "c": spec.c}
    return DirectedGraph(spec.n, frozenset(edges), 0), extra, meta


def gen_hybrid(spec: GenSpec) -> DirectedGraph:
    return _hybrid(spec)[0]


# -- strongly connected components --------------------------------------


def _scc(spec: GenSpec) -> tuple[DirectedGraph, list[list[int]], frozenset[Edge]]:
    n, k = spec.n, spec.k
    if k is None or k < 1 or n < 1:
        raise ValueError("scc needs n >= 1 and 1 <= k")
    if k > n:
        raise ValueError(f"cannot split {n} vertices into {k} non-empty components")
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(n).tolist()
    cuts = sorted(int(x) + 1 for x in rng.choice(n - 1, size=k - 1, replace=False)) if k > 1 else []
    bounds = [0, *cuts, n]
    comps = [perm[a:b] for a, b in zip(bounds, bounds[1:])]
    edges: set[Edge] = set()
    for comp in comps:
        if len(comp) > 1:
            edges |= {(comp[t], comp[(t + 1) % len(comp)]) for t in range(len(comp))}
    p = min(1.0, 3.0 / k)
    dag = {(a, b) for a in range(k) for b in range(a + 1, k) if rng.random() < p}
    reduced = _reduce_dag(k, dag)
    for a, b in sorted(reduced):
        u = comps[a][int(rng.integers(len(comps[a])))]
        v = comps[b][int(rng.integers(len(comps[b])))]
        edges.add((u, v))
    return DirectedGraph(n, frozenset(edges)), comps, reduced


def gen_scc(spec: GenSpec) -> DirectedGraph:
    return _scc(spec)[0]


# -- dispatch -----------------------------------------------------------


def generate(spec: GenSpec) -> tuple[DirectedGraph, dict]:
    """Build the instance for ``spec`` together with its metadata sidecar."""
    extra: Edge | None = None
    info: dict = {}
    if spec.family == "tree":
        g = gen_tree(spec)
    elif spec.family == "almost_tree":
        g, extra = _almost_tree(spec)
    elif spec.family == "caterpillar":
        g, (i, j) = _caterpillar(spec)
        m = spec.n // 2
        extra = (m + i - 1, m + j - 1)
        info = {"legs": [i, j]}
    elif spec.family == "hybrid":
        g, extra, info = _hybrid(spec)
    elif spec.family == "kary":
        g = gen_kary(spec)
    else:
        g, comps, reduced = _scc(spec)
        info = {"k": len(comps), "components": [sorted(c) for c in comps],
                "component_dag": [list(e) for e in sorted(reduced)]}
    meta = {
        "family": spec.family,
        "seed": spec.seed,
        "h": height(g) if g.root is not None else None,
        "d": spec.d,
        "extra_edge": list(extra) if extra else None,
        "n_vertices": g.n,
        **info,
    }
    return g, meta
