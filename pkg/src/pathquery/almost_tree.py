"""Reconstruct bounded-degree rooted trees and almost-trees from path queries.

The learner runs in two stages. First it recovers a *layered graph*: a
spanning tree of the hidden graph made only of true edges. It does so by
recursively cutting the vertex set along an edge ``(p(v), v)`` whose
descendant side holds between ``|V|/3d`` and ``|V|/3`` of the vertices; such
a splittable ``v`` always exists and is found by a randomized search up the
ancestors of a random vertex. Second, it scans the layered graph top-down for
a child that reaches a leaf in a sibling's subtree, which can only happen
through the one edge the layered graph is missing, and then walks down from
that child and up from that leaf to pin the edge down.

Descendant and ancestor sets are always taken relative to the current
working set ``V``. Every working set produced by the recursion is a
reachability-closed set minus a union of reachability-closed sets, so paths
between its members never leave it and the relative sets agree with the
induced subgraph.

All randomness comes from ``oracle.rng``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

from .errors import PromiseViolation
from .graph import DirectedGraph, Edge
from .oracle import QueryOracle, RelativeView

PHASE_ROOT = "root"
PHASE_BASE = "layered/base"
PHASE_SEARCH = "layered/search"
PHASE_PARENT = "layered/parent"
PHASE_SCAN = "cross/recursive"
PHASE_PIN = "cross/specific"

DEFAULT_RETRY_CAP_MULTIPLIER = 48


@dataclass
class LearnStats:
    searches: int = 0
    retries: int = 0
    splits: int = 0
    max_depth: int = 0


@dataclass(frozen=True)
class LayeredGraph:
    """A spanning tree of the hidden graph built from true edges only."""

    root: int
    edges: frozenset[Edge]

    @classmethod
    def from_edges(cls, vertices: Iterable[int], edges: Iterable[Edge]) -> LayeredGraph:
        vs = set(vertices)
        edges = frozenset(edges)
        parent: dict[int, int] = {}
        for u, v in edges:
            if u not in vs or v not in vs:
                raise PromiseViolation(f"layered edge {(u, v)} leaves the vertex set")
            if v in parent:
                raise PromiseViolation(f"vertex {v} got two layered parents")
            parent[v] = u
        roots = vs - parent.keys()
        if len(roots) != 1:
            raise PromiseViolation(f"layered graph has {len(roots)} roots")
        g = cls(roots.pop(), edges)
        if len(g.preorder) != len(vs):
            raise PromiseViolation("layered graph does not span the vertex set")
        return g

    @cached_property
    def parent(self) -> dict[int, int]:
        return {v: u for u, v in self.edges}

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        kids: dict[int, list[int]] = {}
        for u, v in self.edges:
            kids.setdefault(u, []).append(v)
        return {u: tuple(sorted(k)) for u, k in kids.items()}

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        order = []
        stack = [self.root]
        while stack:
            x = stack.pop()
            order.append(x)
            stack.extend(reversed(self.children.get(x, ())))
        return tuple(order)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(x for x in self.preorder if x not in self.children)

    @cached_property
    def leaves_under(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, tuple[int, ...]] = {}
        for x in reversed(self.preorder):
            kids = self.children.get(x)
            out[x] = tuple(l for c in kids for l in out[c]) if kids else (x,)
        return out


@dataclass
class SearchState:
    """Working set, live candidates, and the splittable window ``[|V|/3d, |V|/3]``."""

    working_set: frozenset[int]
    d: int
    candidates: set[int] = field(default_factory=set)

    @property
    def lower(self) -> float:
        return len(self.working_set) / (3 * self.d)

    @property
    def upper(self) -> float:
        return len(self.working_set) / 3

    def classify(self, size: int) -> int:
        """-1 below the window, 0 inside it, +1 above it (exact integer comparisons)."""
        m = len(self.working_set)
        if 3 * size > m:
            return 1
        if 3 * self.d * size < m:
            return -1
        return 0


@dataclass(frozen=True)
class TopVertexWitness:
    v: int
    a: int
    b: int


class SearchOutcome(NamedTuple):
    splittable: bool
    vertex: int | None
    view: RelativeView | None


@dataclass
class Reconstruction:
    graph: DirectedGraph
    layered: LayeredGraph
    cross_edge: Edge | None
    root: int
    stats: LearnStats


# -- layered graph ------------------------------------------------------


def search(
    o: QueryOracle,
    V: Iterable[int],
    d: int,
    *,
    stats: LearnStats | None = None,
    trace: list[int] | None = None,
) -> SearchOutcome:
    """One randomized attempt at finding a splittable vertex of ``V``.

    ``trace``, when given, receives the candidate-set size at the top of each
    binary-search iteration.
    """
    ws = sorted(V)
    if len(ws) < 3:
        raise ValueError("search needs at least three vertices")
    if stats is not None:
        stats.searches += 1
    state = SearchState(frozenset(ws), d)
    i = ws[int(o.rng.integers(len(ws)))]
    view = o.relative_view(i, state.working_set, PHASE_SEARCH)
    verdict = state.classify(len(view.descendants))
    if verdict > 0:
        return SearchOutcome(False, None, None)
    if verdict == 0:
        return SearchOutcome(True, i, view)
    state.candidates = set(view.ancestors)
    while state.candidates:
        if trace is not None:
            trace.append(len(state.candidates))
        pool = sorted(state.candidates)
        i = pool[int(o.rng.integers(len(pool)))]
        view = o.relative_view(i, state.working_set, PHASE_SEARCH)
        verdict = state.classify(len(view.descendants))
        if verdict == 0:
            return SearchOutcome(True, i, view)
        if verdict > 0:
            state.candidates = (state.candidates & view.descendants) - {i}
        else:
            state.candidates -= view.descendants
    return SearchOutcome(False, None, None)


def find_parent(
    o: QueryOracle,
    v: int,
    V: Iterable[int],
    *,
    ancestors: Iterable[int] | None = None,
) -> int:
    """The ancestor of ``v`` in ``V`` with the fewest descendants in ``V`` (ties: smallest id).

    Ancestor descendant sets are nested along each root path, so the minimum
    is attained at an in-neighbour of ``v``. ``ancestors`` may be passed in
    when ``A(v) ∩ V`` is already known.
    """
    ws = sorted(V)
    if v not in ws:
        raise ValueError(f"vertex {v} is not in the working set")
    if ancestors is None:
        others = [u for u in ws if u != v]
        mask = o.query_to(others, v, PHASE_PARENT)
        ancestors = [u for u, hit in zip(others, mask) if hit]
    candidates = sorted(set(ancestors) - {v})
    if not candidates:
        raise PromiseViolation(f"vertex {v} has no ancestor in its working set")
    best: tuple[int, int] | None = None
    for a in candidates:
        others = [u for u in ws if u != a]
        key = (1 + int(o.query_from(a, others, PHASE_PARENT).sum()), a)
        if best is None or key < best:
            best = key
    return best[1]


def split_graph(
    o: QueryOracle,
    V: Iterable[int],
    d: int,
    *,
    retry_cap_multiplier: int = DEFAULT_RETRY_CAP_MULTIPLIER,
    stats: LearnStats | None = None,
) -> tuple[frozenset[int], frozenset[int], Edge]:
    """Cut ``V`` into ``D(v) ∩ V`` and the rest along the true edge ``(p(v), v)``."""
    ws = frozenset(V)
    if len(ws) < 3:
        raise ValueError("split_graph needs at least three vertices")
    cap = retry_cap_multiplier * d * math.ceil(math.log2(len(ws)))
    for _ in range(cap):
        outcome = search(o, ws, d, stats=stats)
        if outcome.splittable:
            break
        if stats is not None:
            stats.retries += 1
    else:
        raise PromiseViolation(f"no splittable vertex found in {cap} searches over {len(ws)} vertices")
    v, view = outcome.vertex, outcome.view
    p = find_parent(o, v, ws, ancestors=view.ancestors)
    if stats is not None:
        stats.splits += 1
    return view.descendants, ws - view.descendants, (p, v)


def reconstruct_layered_graph(
    o: QueryOracle,
    V: Iterable[int],
    d: int,
    *,
    retry_cap_multiplier: int = DEFAULT_RETRY_CAP_MULTIPLIER,
    stats: LearnStats | None = None,
    _depth: int = 0,
) -> frozenset[Edge]:
    """Edges of a layered graph of the subgraph induced on ``V``."""
    ws = sorted(V)
    if stats is not None:
        stats.max_depth = max(stats.max_depth, _depth)
    if _depth > o.n:
        raise PromiseViolation("layered recursion is deeper than the vertex count")
    if len(ws) <= 1:
        return frozenset()
    if len(ws) == 2:
        u, w = ws
        if o.query(u, w, PHASE_BASE):
            return frozenset({(u, w)})
        if o.query(w, u, PHASE_BASE):
            return frozenset({(w, u)})
        raise PromiseViolation(f"vertices {u} and {w} share a working set but neither reaches the other")
    v1, v2, e = split_graph(o, ws, d, retry_cap_multiplier=retry_cap_multiplier, stats=stats)
    kw = dict(retry_cap_multiplier=retry_cap_multiplier, stats=stats, _depth=_depth + 1)
    return reconstruct_layered_graph(o, v1, d, **kw) | reconstruct_layered_graph(o, v2, d, **kw) | {e}


def find_root(o: QueryOracle, V: Iterable[int]) -> int:
    """Knock-out scan: the running candidate is replaced whenever it fails to reach someone."""
    ws = sorted(V)
    if not ws:
        raise ValueError("empty vertex set")
    x = ws[0]
    for u in ws[1:]:
        if not o.query(x, u, PHASE_ROOT):
            x = u
    return x


# -- cross edge ---------------------------------------------------------


def find_cross_edges_recursive(
    o: QueryOracle, layered: LayeredGraph, v: int | None = None
) -> TopVertexWitness | None:
    """First top vertex in preorder below ``v`` (default: the root), or None."""
    stack = [layered.root if v is None else v]
    while stack:
        x = stack.pop()
        kids = layered.children.get(x, ())
        if len(kids) > 1:
            for c in kids:
                pool = [l for k in kids if k != c for l in layered.leaves_under[k]]
                hits = o.query_from(c, pool, PHASE_SCAN)
                if hits.any():
                    return TopVertexWitness(x, c, pool[int(np.argmax(hits))])
        stack.extend(reversed(kids))
    return None


def find_cross_edge_specific(o: QueryOracle, layered: LayeredGraph, w: TopVertexWitness) -> Edge:
    """Walk down from ``w.a`` and up from ``w.b`` to the endpoints of the missing edge."""
    x = w.a
    while True:
        kids = layered.children.get(x, ())
        if not kids:
            break
        hits = np.flatnonzero(o.query_to(kids, w.b, PHASE_PIN))
        if len(hits) > 1:
            raise PromiseViolation(f"two children of {x} reach leaf {w.b}")
        if len(hits) == 0:
            break
        x = kids[hits[0]]
    c1 = x
    if not o.query(c1, w.b, PHASE_PIN):
        raise PromiseViolation(f"{c1} does not reach witness leaf {w.b}")
    y = w.b
    while True:
        p = layered.parent[y]
        if p == w.v or not o.query(c1, p, PHASE_PIN):
            break
        y = p
    return (c1, y)


def find_cross_edges(o: QueryOracle, layered: LayeredGraph) -> Edge | None:
    witness = find_cross_edges_recursive(o, layered)
    if witness is None:
        return None
    return find_cross_edge_specific(o, layered, witness)


# -- driver -------------------------------------------------------------


def reconstruct_rooted_graph(
    o: QueryOracle,
    vertices: Iterable[int] | None = None,
    *,
    d: int,
    retry_cap_multiplier: int = DEFAULT_RETRY_CAP_MULTIPLIER,
) -> Reconstruction:
    """Recover every edge of a hidden rooted tree or reconstructable almost-tree."""
    if d < 1:
        raise ValueError("degree bound must be positive")
    ws = sorted(range(o.n) if vertices is None else set(vertices))
    stats = LearnStats()
    root = find_root(o, ws)
    edges = reconstruct_layered_graph(o, ws, d, retry_cap_multiplier=retry_cap_multiplier, stats=stats)
    layered = LayeredGraph.from_edges(ws, edges)
    if layered.root != root:
        raise PromiseViolation(f"root scan found {root} but the layered graph is rooted at {layered.root}")
    cross = find_cross_edges(o, layered)
    if cross is not None:
        edges = edges | {cross}
    full = len(ws) == o.n
    graph = DirectedGraph(o.n, edges, root if full else None)
    return Reconstruction(graph, layered, cross, root, stats)
