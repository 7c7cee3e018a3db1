"""Counted path-query access to a hidden graph.

:class:`QueryOracle` is the only way learners touch the hidden graph. Every
query is charged, including repeats: there is deliberately no caching, so
measured query counts reflect what an algorithm actually asks.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from os import PathLike
from typing import Iterable

import numpy as np

from .graph import DirectedGraph, closure_matrix


def _as_array(vertices: Iterable[int]) -> np.ndarray:
    if isinstance(vertices, np.ndarray):
        return vertices.astype(np.int64, copy=False)
    return np.fromiter(vertices, dtype=np.int64)


@dataclass(frozen=True)
class RelativeView:
    """Descendants and ancestors of ``base`` restricted to ``working_set``.

    Both sets contain ``base`` itself.
    """

    base: int
    working_set: frozenset[int]
    descendants: frozenset[int]
    ancestors: frozenset[int]


class QueryOracle:
    """Answers ``Q(u, v)`` for a hidden graph and keeps per-phase query counts.

    ``rng`` is a seeded generator that learners draw their randomness from,
    so one seed pins down an entire run.
    """

    def __init__(self, hidden: DirectedGraph, seed: int = 0, record: bool = False) -> None:
        self._hidden = hidden
        self._reach = closure_matrix(hidden)
        self._asked = np.zeros((hidden.n, hidden.n), dtype=bool)
        self.rng_seed = int(seed)
        self.rng = np.random.default_rng(self.rng_seed)
        self.total_queries = 0
        self.distinct_queries = 0
        self.per_phase: Counter[str] = Counter()
        self._transcript: list[tuple[np.ndarray, np.ndarray, np.ndarray, str]] | None = (
            [] if record else None
        )

    @property
    def n(self) -> int:
        return self._hidden.n

    def _check(self, vertices: np.ndarray) -> None:
        if vertices.size and (vertices.min() < 0 or vertices.max() >= self.n):
            bad = vertices[(vertices < 0) | (vertices >= self.n)][0]
            raise ValueError(f"vertex {bad} out of range for n={self.n}")

    def _charge(self, us: np.ndarray, vs: np.ndarray, phase: str) -> np.ndarray:
        answers = self._reach[us, vs]
        count = int(us.size)
        if count == 0:
            return answers
        self.total_queries += count
        self.per_phase[phase] += count
        fresh = ~self._asked[us, vs]
        if fresh.any():
            pairs = np.unique(us[fresh] * self.n + vs[fresh])
            self.distinct_queries += int(pairs.size)
            self._asked[us[fresh], vs[fresh]] = True
        if self._transcript is not None:
            self._transcript.append((us.copy(), vs.copy(), answers.copy(), phase))
        return answers

    def query(self, u: int, v: int, phase: str = "default") -> int:
        u, v = int(u), int(v)
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"query {(u, v)} out of range for n={self.n}")
        bit = int(self._reach[u, v])
        self.total_queries += 1
        self.per_phase[phase] += 1
        if not self._asked[u, v]:
            self._asked[u, v] = True
            self.distinct_queries += 1
        if self._transcript is not None:
            self._transcript.append((np.array([u]), np.array([v]), np.array([bit], dtype=bool), phase))
        return bit

    def query_from(self, u: int, targets: Iterable[int], phase: str = "default") -> np.ndarray:
        """Ask ``Q(u, t)`` for each ``t`` in order; returns a boolean array."""
        vs = _as_array(targets)
        self._check(np.array([u]))
        self._check(vs)
        us = np.full(vs.shape, u, dtype=np.int64)
        return self._charge(us, vs, phase)

    def query_to(self, sources: Iterable[int], v: int, phase: str = "default") -> np.ndarray:
        """Ask ``Q(s, v)`` for each ``s`` in order; returns a boolean array."""
        us = _as_array(sources)
        self._check(us)
        self._check(np.array([v]))
        vs = np.full(us.shape, v, dtype=np.int64)
        return self._charge(us, vs, phase)

    def view_masks(self, i: int, others: np.ndarray, phase: str) -> tuple[np.ndarray, np.ndarray]:
        """Descendant and ancestor masks of ``i`` over ``others`` (which must exclude ``i``)."""
        down = self.query_from(i, others, phase)
        up = self.query_to(others, i, phase)
        return down, up

    def relative_view(self, i: int, working_set: Iterable[int], phase: str = "default") -> RelativeView:
        """Compute ``D(i)`` and ``A(i)`` inside ``working_set`` with ``2(|V|-1)`` queries."""
        ws = frozenset(int(u) for u in working_set)
        if i not in ws:
            raise ValueError(f"vertex {i} is not in the working set")
        others = np.array(sorted(ws - {i}), dtype=np.int64)
        down, up = self.view_masks(i, others, phase)
        return RelativeView(
            base=i,
            working_set=ws,
            descendants=frozenset(others[down].tolist()) | {i},
            ancestors=frozenset(others[up].tolist()) | {i},
        )

    # -- transcript ----------------------------------------------------

    def phase_total(self, prefix: str) -> int:
        """Sum of counters whose label is ``prefix`` or starts with ``prefix + '/'``."""
        return sum(c for p, c in self.per_phase.items() if p == prefix or p.startswith(prefix + "/"))

    def transcript_lines(self) -> list[str]:
        if self._transcript is None:
            raise RuntimeError("oracle was created without record=True")
        lines = []
        for us, vs, bits, phase in self._transcript:
            lines.extend(f"{u},{v},{int(b)},{phase}" for u, v, b in zip(us.tolist(), vs.tolist(), bits.tolist()))
        return lines

    def transcript_digest(self) -> str:
        h = hashlib.sha256()
        for line in self.transcript_lines():
            h.update(line.encode())
            h.update(b"\n")
        return h.hexdigest()

    def dump_transcript(self, path: str | PathLike) -> None:
        with open(path, "w") as fh:
            for line in self.transcript_lines():
                fh.write(line + "\n")
