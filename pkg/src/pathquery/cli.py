"""Command-line driver: ``pathquery {gen,learn,bench,verify}``.

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from .almost_tree import DEFAULT_RETRY_CAP_MULTIPLIER
from .errors import AlmostTreeRejected, GenerationInfeasible
from .generators import FAMILIES, GenSpec, generate
from .graph import DirectedGraph, _dfs, strongly_connected_components, validate_almost_tree

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def meta_path(out: Path) -> Path:
    return out.with_name(out.stem + ".meta.json")


def _print(obj) -> None:
    print(json.dumps(obj))


def _fail(msg: str, code: int = EXIT_INVALID) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        h = bench_mod.resolve_param(args.h, args.n)
        k = bench_mod.resolve_param(args.k, args.n)
        spec = GenSpec(args.family, args.n, args.d, h=h, k=k, seed=args.seed, c=args.c)
        graph, meta = generate(spec)
    except GenerationInfeasible as exc:
        return _fail(f"generation-infeasible: {exc}")
    except ValueError as exc:
        return _fail(str(exc))
    out = Path(args.out)
    graph.save(out)
    meta_path(out).write_text(json.dumps(meta) + "\n")
    _print({"graph": str(out), "meta": str(meta_path(out)), "n_vertices": graph.n, "edges": len(graph.edges)})
    return EXIT_OK


def _load(path: str) -> DirectedGraph:
    try:
        return DirectedGraph.load(path)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc.strerror}") from None


def cmd_learn(args: argparse.Namespace) -> int:
    try:
        graph = _load(args.graph)
    except ValueError as exc:
        return _fail(str(exc))
    out = bench_mod.run_experiment(
        graph, args.algo, d=args.d, seed=args.seed,
        retry_cap_multiplier=args.retry_cap_multiplier, record=args.transcript is not None,
    )
    if args.transcript:
        Path(args.transcript).write_text("".join(line + "\n" for line in out.transcript))
    if args.out:
        Path(args.out).write_text(json.dumps(out.output) + "\n")
    _print({"record": out.record.to_dict(), "output": out.output})
    return EXIT_OK if out.record.success else EXIT_FAIL


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        sizes = [int(x) for chunk in args.n for x in chunk.split(",") if x]
        records = bench_mod.bench(
            args.family, sizes, args.seeds_per_cell, base_seed=args.seed, d=args.d,
            h=args.h, k=args.k, retry_cap_multiplier=args.retry_cap_multiplier, jobs=args.jobs,
        )
    except ValueError as exc:
        return _fail(str(exc))
    bench_mod.write_csv(records, args.out)
    summary = bench_mod.summarize(records)
    _print(summary)
    failed = [r for r in records if not r.success]
    if failed:
        return _fail(f"{len(failed)} of {len(records)} rows failed verification", EXIT_FAIL)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        data = json.loads(Path(args.graph).read_text())
        root = data.get("root") if isinstance(data, dict) else None
        bare = DirectedGraph.from_dict({**data, "root": None})
    except (OSError, ValueError) as exc:
        return _fail(f"cannot load {args.graph}: {exc}")
    if root is None:
        # unrooted: check the SCC promise (no transitive edges between components)
        part = strongly_connected_components(bare)
        labels = {u: i for i, c in enumerate(part.components) for u in c}
        cross = {(labels[u], labels[v]) for u, v in bare.edges if labels[u] != labels[v]}
        ok = cross == set(part.condensation_edges)
        _print({"kind": "scc", "promise_holds": ok, **part.to_dict()})
        return EXIT_OK if ok else EXIT_FAIL
    if not isinstance(root, int) or not 0 <= root < bare.n:
        return _fail(f"root {root!r} is not a vertex")
    if len(_dfs(bare.successors, root)) != bare.n:
        _print({"kind": "almost_tree", "accepted": False, "reason": "not-rooted"})
        return EXIT_FAIL
    try:
        cert = validate_almost_tree(DirectedGraph(bare.n, bare.edges, root))
    except AlmostTreeRejected as exc:
        _print({"kind": "almost_tree", "accepted": False, "reason": exc.reason, "detail": exc.detail})
        return EXIT_FAIL
    _print({"kind": "almost_tree", "accepted": True, "certificate": cert.to_dict()})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathquery", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file plus metadata sidecar")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--h", default=None, help="target height (hybrid): int, 'log[:c]' or 'sqrt'")
    g.add_argument("--k", default=None, help="component count (scc): int, 'sqrt' or 'n'")
    g.add_argument("--c", type=float, default=0.25, help="hybrid slack: require h > (1+c) log_d n")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    lr = sub.add_parser("learn", help="learn a graph file through a counted oracle")
    lr.add_argument("graph")
    lr.add_argument("--algo", choices=bench_mod.ALGOS, required=True)
    lr.add_argument("--d", type=int, default=None, help="degree bound (default: the file's max degree)")
    lr.add_argument("--seed", type=int, default=0)
    lr.add_argument("--retry-cap-multiplier", type=int, default=DEFAULT_RETRY_CAP_MULTIPLIER)
    lr.add_argument("--out", default=None, help="write the reconstructed output here")
    lr.add_argument("--transcript", default=None, help="write the u,v,bit,phase query transcript here")
    lr.set_defaults(func=cmd_learn)

    b = sub.add_parser("bench", help="run a size grid and write a CSV report")
    b.add_argument("--family", choices=FAMILIES, required=True)
    b.add_argument("--n", action="append", required=True, help="sizes, comma separated or repeated")
    b.add_argument("--d", type=int, default=3)
    b.add_argument("--h", default=None)
    b.add_argument("--k", default=None)
    b.add_argument("--seed", type=int, default=0, help="base seed for row-seed derivation")
    b.add_argument("--seeds-per-cell", type=int, default=5)
    b.add_argument("--retry-cap-multiplier", type=int, default=DEFAULT_RETRY_CAP_MULTIPLIER)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="check a graph file against the learners' promises")
    v.add_argument("graph")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
