"""Ground-truth digraphs, reachability, and promise-class validation.

Everything here is a pure function of an immutable :class:`DirectedGraph`.
Nothing in this module charges path queries; it is the verification side
that learners are checked against.

Conventions: vertices are ``0..n-1``; every vertex reaches itself through
the empty path, so ``reaches(g, u, u)`` is always true.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from os import PathLike
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import AlmostTreeRejected

Edge = tuple[int, int]


@dataclass(frozen=True)
class DirectedGraph:
    """Hidden graph on vertices ``0..n-1`` with an optional root."""

    n: int
    edges: frozenset[Edge]
    root: int | None = None

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        for u, v in edges:
            self._check_vertex(u)
            self._check_vertex(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
        if self.root is not None:
            object.__setattr__(self, "root", int(self.root))
            self._check_vertex(self.root)
            seen = _dfs(self.successors, self.root)
            if len(seen) != self.n:
                missing = min(set(range(self.n)) - seen)
                raise ValueError(f"vertex {missing} is not reachable from root {self.root}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge], root: int | None = None) -> DirectedGraph:
        """Build from an edge list, rejecting duplicates instead of silently merging them."""
        edge_list = [(int(u), int(v)) for u, v in edges]
        if len(set(edge_list)) != len(edge_list):
            raise ValueError("duplicate edge in edge list")
        return cls(n, frozenset(edge_list), root)

    def _check_vertex(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise ValueError(f"vertex {u} out of range for n={self.n}")

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            out[u].append(v)
        return tuple(tuple(sorted(s)) for s in out)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            inc[v].append(u)
        return tuple(tuple(sorted(s)) for s in inc)

    def degree(self, u: int) -> int:
        """Total degree (in + out)."""
        return len(self.successors[u]) + len(self.predecessors[u])

    def max_degree(self) -> int:
        return max((self.degree(u) for u in range(self.n)), default=0)

    def with_edge(self, u: int, v: int) -> DirectedGraph:
        if (u, v) in self.edges:
            raise ValueError(f"edge {(u, v)} already present")
        return DirectedGraph(self.n, self.edges | {(u, v)}, self.root)

    def without_edge(self, u: int, v: int) -> DirectedGraph:
        return DirectedGraph(self.n, self.edges - {(u, v)}, self.root)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {"n": self.n, "root": self.root, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_dict(cls, data: dict) -> DirectedGraph:
        try:
            n = data["n"]
            edges = data["edges"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed graph object: {exc}") from None
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValueError("'n' must be an integer")
        root = data.get("root")
        if root is not None and (not isinstance(root, int) or isinstance(root, bool)):
            raise ValueError("'root' must be an integer or null")
        if not isinstance(edges, list) or any(
            not isinstance(e, (list, tuple)) or len(e) != 2 for e in edges
        ):
            raise ValueError("'edges' must be a list of [u, v] pairs")
        return cls.from_edges(n, (tuple(e) for e in edges), root)

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> DirectedGraph:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def save(self, path: str | PathLike) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    @classmethod
    def load(cls, path: str | PathLike) -> DirectedGraph:
        with open(path) as fh:
            return cls.loads(fh.read())


def _dfs(successors, start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in successors[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


# -- reachability ------------------------------------------------------


def reaches(g: DirectedGraph, u: int, v: int) -> bool:
    """True iff a directed path (possibly empty) leads from ``u`` to ``v``."""
    g._check_vertex(u)
    g._check_vertex(v)
    if u == v:
        return True
    seen = {u}
    stack = [u]
    succ = g.successors
    while stack:
        x = stack.pop()
        for w in succ[x]:
            if w == v:
                return True
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def descendants(g: DirectedGraph, u: int) -> set[int]:
    g._check_vertex(u)
    return _dfs(g.successors, u)


def reach_bits(g: DirectedGraph) -> list[int]:
    """Descendant sets as Python-int bitsets, one per vertex (bit ``v`` of entry ``u``).

    Cycles are collapsed through the SCC condensation so every component is
    visited once, after all of its successor components.
    """
    labels, members = _scc_labels(g)
    k = len(members)
    comp_succ: list[set[int]] = [set() for _ in range(k)]
    for u, v in g.edges:
        if labels[u] != labels[v]:
            comp_succ[labels[u]].add(labels[v])
    comp_bits = [0] * k
    # static_order yields every component after the components it points to
    for c in TopologicalSorter({c: comp_succ[c] for c in range(k)}).static_order():
        bits = 0
        for u in members[c]:
            bits |= 1 << u
        for s in comp_succ[c]:
            bits |= comp_bits[s]
        comp_bits[c] = bits
    return [comp_bits[labels[u]] for u in range(g.n)]


def closure_matrix(g: DirectedGraph) -> np.ndarray:
    """Boolean ``n x n`` reachability matrix (reflexive)."""
    n = g.n
    out = np.zeros((n, n), dtype=bool)
    nbytes = (n + 7) // 8
    for u, bits in enumerate(reach_bits(g)):
        raw = np.frombuffer(bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        out[u] = np.unpackbits(raw, bitorder="little")[:n].astype(bool)
    return out


def closure_by_squaring(g: DirectedGraph) -> np.ndarray:
    """Independent reachability oracle: square ``I + A`` until it stops changing."""
    n = g.n
    r = np.eye(n, dtype=bool)
    for u, v in g.edges:
        r[u, v] = True
    while True:
        f = r.astype(np.float64)
        nxt = (f @ f) > 0
        if np.array_equal(nxt, r):
            return r
        r = nxt


def is_acyclic(g: DirectedGraph) -> bool:
    try:
        tuple(TopologicalSorter({u: g.predecessors[u] for u in range(g.n)}).static_order())
    except CycleError:
        return False
    return True


def _reduce_dag(n: int, edges: Iterable[Edge]) -> frozenset[Edge]:
    """Transitive reduction of a DAG given as ``(n, edges)``; raises on cycles."""
    g = DirectedGraph(n, frozenset(edges))
    if not is_acyclic(g):
        raise ValueError("transitive reduction requires an acyclic graph")
    # in a DAG, (u, v) is implied iff v is a strict descendant of some successor of u
    strict = [bits & ~(1 << w) for w, bits in enumerate(reach_bits(g))]
    keep = set()
    for u in range(n):
        below = 0
        for w in g.successors[u]:
            below |= strict[w]
        keep.update((u, v) for v in g.successors[u] if not (below >> v) & 1)
    return frozenset(keep)


def transitive_reduction(g: DirectedGraph) -> frozenset[Edge]:
    """Minimal edge subset with the same reachability relation (DAGs only)."""
    return _reduce_dag(g.n, g.edges)


# -- strongly connected components -------------------------------------


@dataclass(frozen=True)
class SccPartition:
    """Components ``S_1..S_k`` and the condensation edges between them (by index)."""

    components: tuple[frozenset[int], ...]
    condensation_edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(frozenset(c) for c in self.components))
        object.__setattr__(
            self, "condensation_edges", frozenset((int(i), int(j)) for i, j in self.condensation_edges)
        )
        k = len(self.components)
        if any(not c for c in self.components):
            raise ValueError("components must be non-empty")
        for i, j in self.condensation_edges:
            if not (0 <= i < k and 0 <= j < k) or i == j:
                raise ValueError(f"bad condensation edge {(i, j)}")

    @property
    def k(self) -> int:
        return len(self.components)

    def vertex_sets(self) -> frozenset[frozenset[int]]:
        return frozenset(self.components)

    def set_edges(self) -> frozenset[tuple[frozenset[int], frozenset[int]]]:
        """Condensation edges keyed by component contents, independent of index order."""
        return frozenset((self.components[i], self.components[j]) for i, j in self.condensation_edges)

    def same_as(self, other: SccPartition) -> bool:
        return self.vertex_sets() == other.vertex_sets() and self.set_edges() == other.set_edges()

    def to_dict(self) -> dict:
        return {
            "components": [sorted(c) for c in self.components],
            "condensation_edges": [list(e) for e in sorted(self.condensation_edges)],
        }


def _scc_labels(g: DirectedGraph) -> tuple[np.ndarray, list[list[int]]]:
    """Component label per vertex, components numbered by their smallest vertex."""
    if g.n == 0:
        return np.zeros(0, dtype=np.int64), []
    rows = [u for u, _ in g.edges]
    cols = [v for _, v in g.edges]
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n))
    _, raw = connected_components(adj, directed=True, connection="strong")
    relabel: dict[int, int] = {}
    labels = np.empty(g.n, dtype=np.int64)
    members: list[list[int]] = []
    for u in range(g.n):
        c = relabel.setdefault(int(raw[u]), len(relabel))
        if c == len(members):
            members.append([])
        members[c].append(u)
        labels[u] = c
    return labels, members


def strongly_connected_components(g: DirectedGraph) -> SccPartition:
    """Ground-truth SCC partition plus the reduced condensation DAG."""
    labels, members = _scc_labels(g)
    cross = {(int(labels[u]), int(labels[v])) for u, v in g.edges if labels[u] != labels[v]}
    return SccPartition(tuple(frozenset(m) for m in members), _reduce_dag(len(members), cross))


# -- almost-tree validation --------------------------------------------


@dataclass(frozen=True)
class AlmostTreeCertificate:
    tree_edges: frozenset[Edge]
    extra_edge: Edge | None
    height: int
    max_degree: int

    def to_dict(self) -> dict:
        return {
            "tree_edges": [list(e) for e in sorted(self.tree_edges)],
            "extra_edge": list(self.extra_edge) if self.extra_edge else None,
            "height": self.height,
            "max_degree": self.max_degree,
        }


def height(g: DirectedGraph) -> int:
    """Number of edges on the longest path out of the root (DAGs only)."""
    if g.root is None:
        raise ValueError("height is defined for rooted graphs")
    order = TopologicalSorter({u: g.predecessors[u] for u in range(g.n)}).static_order()
    depth = [-1] * g.n
    depth[g.root] = 0
    for u in order:
        if depth[u] < 0:
            continue
        for w in g.successors[u]:
            depth[w] = max(depth[w], depth[u] + 1)
    return max(depth)


def validate_almost_tree(g: DirectedGraph) -> AlmostTreeCertificate:
    """Certify ``g`` as a rooted tree or a path-query-reconstructable almost-tree.

    When the in-degree-2 vertex has two incomparable parents, either in-edge
    could be called the extra one; the edge from the larger-indexed parent is
    reported as ``extra_edge``.
    """
    if g.root is None:
        raise AlmostTreeRejected("not-rooted", "graph has no root")
    if g.n == 0:
        raise AlmostTreeRejected("not-rooted", "empty graph")
    m = len(g.edges)
    if m > g.n:
        raise AlmostTreeRejected("more-than-one-extra-edge", f"{m} edges on {g.n} vertices")
    if not is_acyclic(g) or g.predecessors[g.root]:
        raise AlmostTreeRejected("cycle-created", "graph contains a directed cycle")
    if m == g.n - 1:
        return AlmostTreeCertificate(g.edges, None, height(g), g.max_degree())
    # acyclic, n edges, root reaches everything: exactly one vertex has in-degree 2
    head = next(u for u in range(g.n) if len(g.predecessors[u]) == 2)
    q1, q2 = g.predecessors[head]
    if reaches(g, q1, q2) or reaches(g, q2, q1):
        upper = q1 if reaches(g, q1, q2) else q2
        raise AlmostTreeRejected(
            "transitive-extra-edge", f"edge {(upper, head)} is implied by a longer path"
        )
    extra = (max(q1, q2), head)
    return AlmostTreeCertificate(g.edges - {extra}, extra, height(g), g.max_degree())
