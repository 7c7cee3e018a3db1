"""Run learners against counted oracles and collect scaling reports.

Each bench row is driven by one 64-bit row seed. The generator seed and the
learner seed are derived from it with :func:`sub_seeds`, so a row can be
replayed from its CSV line alone.
"""

from __future__ import annotations

import csv
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterable

import numpy as np

from .almost_tree import DEFAULT_RETRY_CAP_MULTIPLIER, reconstruct_rooted_graph
from .errors import PromiseViolation
from .generators import FAMILIES, GenSpec, generate
from .graph import DirectedGraph, height, is_acyclic, strongly_connected_components
from .oracle import QueryOracle
from .scc import learn_scc

CSV_COLUMNS = (
    "family", "n", "d", "h", "k", "seed", "algo", "total_queries",
    "phase_root", "phase_layered", "phase_cross", "retries", "success",
    "wall_ms", "norm_tree", "norm_scc",
)
ALGOS = ("almost_tree", "scc")


def row_seed(base_seed: int, family: str, n: int, rep: int) -> int:
    words = np.random.SeedSequence([base_seed, FAMILIES.index(family), n, rep]).generate_state(2)
    return int(words[0]) << 32 | int(words[1])


def sub_seeds(seed: int) -> tuple[int, int]:
    """``(generator_seed, learner_seed)`` derived from a row seed."""
    gen, learn = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    return int(gen), int(learn)


def resolve_param(value: str | int | None, n: int) -> int | None:
    """Turn ``"12"``, ``"log"``, ``"log:3"``, ``"sqrt"`` or ``"n"`` into an integer for size ``n``."""
    if value is None or isinstance(value, int):
        return value
    text = value.strip()
    if text == "n":
        return n
    if text == "sqrt":
        return math.ceil(math.sqrt(n))
    if text.startswith("log"):
        factor = float(text.split(":", 1)[1]) if ":" in text else 1.0
        return math.ceil(factor * math.log2(n))
    return int(text)


@dataclass
class ExperimentRecord:
    family: str
    n: int
    d: int
    h: int | None
    k: int | None
    seed: int
    algo: str
    total_queries: int
    phase_queries: dict[str, int]
    success: bool
    retries: int = 0
    wall_ms: float = 0.0
    error: str | None = None
    gen_spec: GenSpec | None = None
    distinct_queries: int = 0

    def phase(self, prefix: str) -> int:
        return sum(c for p, c in self.phase_queries.items() if p == prefix or p.startswith(prefix + "/"))

    @property
    def norm_tree(self) -> float | None:
        if self.algo != "almost_tree" or self.n < 2:
            return None
        return self.total_queries / (self.n * math.log2(self.n) ** 3 + self.n * (self.h or 0))

    @property
    def norm_scc(self) -> float | None:
        if self.algo != "scc" or not self.k:
            return None
        return self.total_queries / (self.n * self.k)

    def to_dict(self, wall: bool = True) -> dict:
        out = {
            "family": self.family, "n": self.n, "d": self.d, "h": self.h, "k": self.k,
            "seed": self.seed, "algo": self.algo, "total_queries": self.total_queries,
            "distinct_queries": self.distinct_queries, "phase_queries": dict(sorted(self.phase_queries.items())),
            "success": self.success, "retries": self.retries, "error": self.error,
            "gen_spec": self.gen_spec.to_dict() if self.gen_spec else None,
        }
        if wall:
            out["wall_ms"] = self.wall_ms
        return out

    def csv_row(self) -> dict:
        def fmt(x):
            return "" if x is None else x

        return {
            "family": self.family, "n": self.n, "d": self.d, "h": fmt(self.h), "k": fmt(self.k),
            "seed": self.seed, "algo": self.algo, "total_queries": self.total_queries,
            "phase_root": self.phase("root"), "phase_layered": self.phase("layered"),
            "phase_cross": self.phase("cross"), "retries": self.retries, "success": int(self.success),
            "wall_ms": f"{self.wall_ms:.3f}",
            "norm_tree": "" if self.norm_tree is None else f"{self.norm_tree:.6g}",
            "norm_scc": "" if self.norm_scc is None else f"{self.norm_scc:.6g}",
        }

    @classmethod
    def from_csv_row(cls, row: dict) -> ExperimentRecord:
        def opt(x):
            return None if x in ("", None) else int(x)

        phases = {p: int(row[f"phase_{p}"]) for p in ("root", "layered", "cross") if int(row[f"phase_{p}"])}
        total = int(row["total_queries"])
        rest = total - sum(phases.values())
        if rest:
            phases["other"] = rest
        return cls(
            family=row["family"], n=int(row["n"]), d=int(row["d"]), h=opt(row["h"]), k=opt(row["k"]),
            seed=int(row["seed"]), algo=row["algo"], total_queries=total, phase_queries=phases,
            success=bool(int(row["success"])), retries=int(row["retries"]), wall_ms=float(row["wall_ms"]),
        )


@dataclass
class Outcome:
    record: ExperimentRecord
    output: dict = field(default_factory=dict)
    digest: str | None = None
    transcript: list[str] | None = None


def _edge_diff(learned: frozenset, hidden: frozenset) -> str:
    missing, extra = sorted(hidden - learned), sorted(learned - hidden)
    return f"reconstruction differs: missing {missing[:5]}, spurious {extra[:5]}"


def run_experiment(
    graph: DirectedGraph,
    algo: str,
    *,
    d: int | None = None,
    seed: int = 0,
    retry_cap_multiplier: int = DEFAULT_RETRY_CAP_MULTIPLIER,
    record: bool = False,
    family: str = "file",
    n: int | None = None,
    h: int | None = None,
    k: int | None = None,
    gen_spec: GenSpec | None = None,
) -> Outcome:
    """Learn ``graph`` through a fresh oracle and check the result against ground truth.

    ``d`` defaults to the graph's own maximum degree. Promise violations are
    reported as ``success=False`` with the message in ``error``.
    """
    if algo not in ALGOS:
        raise ValueError(f"unknown algo {algo!r}; expected one of {ALGOS}")
    truth = strongly_connected_components(graph)
    if h is None and graph.root is not None and is_acyclic(graph):
        h = height(graph)
    d = max(graph.max_degree(), 2) if d is None else d
    oracle = QueryOracle(graph, seed=seed, record=record)
    output: dict = {}
    error = None
    retries = 0
    start = time.perf_counter()
    try:
        if algo == "almost_tree":
            rec = reconstruct_rooted_graph(oracle, d=d, retry_cap_multiplier=retry_cap_multiplier)
            retries = rec.stats.retries
            success = rec.graph.edges == graph.edges
            if not success:
                error = _edge_diff(rec.graph.edges, graph.edges)
            output = {
                **rec.graph.to_dict(),
                "cross_edge": list(rec.cross_edge) if rec.cross_edge else None,
            }
        else:
            learned = learn_scc(oracle)
            success = learned.same_as(truth)
            if not success:
                error = "learned components or condensation differ from ground truth"
            output = learned.to_dict()
    except (PromiseViolation, ValueError) as exc:
        success, error = False, f"{type(exc).__name__}: {exc}"
    wall_ms = (time.perf_counter() - start) * 1000
    output["phases"] = dict(sorted(oracle.per_phase.items()))
    rec_ = ExperimentRecord(
        family=family, n=graph.n if n is None else n, d=d, h=h, k=truth.k if k is None else k,
        seed=seed, algo=algo, total_queries=oracle.total_queries,
        phase_queries=dict(oracle.per_phase), success=success, retries=retries,
        wall_ms=wall_ms, error=error, gen_spec=gen_spec, distinct_queries=oracle.distinct_queries,
    )
    if not record:
        return Outcome(rec_, output)
    return Outcome(rec_, output, oracle.transcript_digest(), oracle.transcript_lines())


def degree_bound(spec: GenSpec, graph: DirectedGraph) -> int:
    """Degree bound handed to the learner: the generator's promise where it is one."""
    if spec.family in ("tree", "almost_tree"):
        return spec.d
    return max(graph.max_degree(), 2)


def run_row(
    family: str,
    n: int,
    seed: int,
    *,
    d: int = 3,
    h: int | None = None,
    k: int | None = None,
    retry_cap_multiplier: int = DEFAULT_RETRY_CAP_MULTIPLIER,
    record: bool = False,
) -> Outcome:
    """One bench row: generate from the row seed, learn, verify."""
    gen_seed, learn_seed = sub_seeds(seed)
    spec = GenSpec(family, n, d, h=h if family == "hybrid" else None,
                   k=k if family == "scc" else None, seed=gen_seed)
    graph, meta = generate(spec)
    algo = "scc" if family == "scc" else "almost_tree"
    out = run_experiment(
        graph, algo, d=degree_bound(spec, graph), seed=learn_seed,
        retry_cap_multiplier=retry_cap_multiplier, record=record, family=family, n=n,
        h=meta["h"], gen_spec=spec,
    )
    out.record.seed = seed
    out.record.d = d
    return out


def rerun(record: ExperimentRecord, retry_cap_multiplier: int = DEFAULT_RETRY_CAP_MULTIPLIER) -> Outcome:
    """Replay a bench row (e.g. one parsed back from CSV) with transcript recording on."""
    return run_row(record.family, record.n, record.seed, d=record.d, h=record.h, k=record.k,
                   retry_cap_multiplier=retry_cap_multiplier, record=True)


def _row_job(args: tuple) -> ExperimentRecord:
    family, n, seed, d, h, k, cap = args
    return run_row(family, n, seed, d=d, h=h, k=k, retry_cap_multiplier=cap).record


def bench(
    family: str,
    sizes: Iterable[int],
    seeds_per_cell: int,
    *,
    base_seed: int = 0,
    d: int = 3,
    h: str | int | None = None,
    k: str | int | None = None,
    retry_cap_multiplier: int = DEFAULT_RETRY_CAP_MULTIPLIER,
    jobs: int = 1,
) -> list[ExperimentRecord]:
    sizes = list(sizes)
    if not sizes or seeds_per_cell < 1:
        raise ValueError("bench grid is empty")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    tasks = [
        (family, n, row_seed(base_seed, family, n, rep), d, resolve_param(h, n), resolve_param(k, n),
         retry_cap_multiplier)
        for n in sizes
        for rep in range(seeds_per_cell)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_row_job, tasks))
    return [_row_job(t) for t in tasks]


def summarize(records: Iterable[ExperimentRecord]) -> dict:
    """Per-size medians and ratios between consecutive sizes."""
    by_n: dict[int, list[ExperimentRecord]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r)
    cells = []
    for n in sorted(by_n):
        rows = by_n[n]
        norms = [r.norm_tree if r.algo == "almost_tree" else r.norm_scc for r in rows]
        norms = [x for x in norms if x is not None]
        cells.append({
            "n": n,
            "runs": len(rows),
            "failures": sum(not r.success for r in rows),
            "median_queries": statistics.median(r.total_queries for r in rows),
            "median_norm": statistics.median(norms) if norms else None,
        })
    ratios = [
        {"from": a["n"], "to": b["n"], "ratio": b["median_queries"] / a["median_queries"]}
        for a, b in zip(cells, cells[1:])
        if a["median_queries"]
    ]
    return {"cells": cells, "ratios": ratios}


def write_csv(records: Iterable[ExperimentRecord], path: str | PathLike) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for r in records:
            writer.writerow(r.csv_row())


def read_csv(path: str | PathLike) -> list[ExperimentRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError("unexpected CSV header")
        return [ExperimentRecord.from_csv_row(row) for row in reader]
