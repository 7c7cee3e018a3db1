import csv
import json
import subprocess
import sys

import pytest

from pathquery import bench as bench_mod
from pathquery.bench import CSV_COLUMNS, ExperimentRecord, read_csv, resolve_param, row_seed, run_experiment
from pathquery.cli import main
from pathquery.graph import DirectedGraph


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def a1_file(a1, tmp_path):
    path = tmp_path / "a1.json"
    a1.save(path)
    return path


@pytest.fixture
def g2_file(g2, tmp_path):
    path = tmp_path / "g2.json"
    g2.save(path)
    return path


# -- gen ------------------------------------------------------------------------


def test_gen_caterpillar(capsys, tmp_path):
    out = tmp_path / "cat.json"
    code, _, _ = run_cli(capsys, "gen", "--family", "caterpillar", "--n", 8, "--out", out)
    assert code == 0
    g = DirectedGraph.load(out)
    assert g.n == 7 and len(g.edges) == 7
    meta = json.loads((tmp_path / "cat.meta.json").read_text())
    assert meta["family"] == "caterpillar" and meta["h"] == 3
    assert tuple(meta["extra_edge"]) in g.edges


def test_gen_single_vertex_tree(capsys, tmp_path):
    out = tmp_path / "t.json"
    assert run_cli(capsys, "gen", "--family", "tree", "--n", 1, "--out", out)[0] == 0
    assert json.loads(out.read_text()) == {"n": 1, "root": 0, "edges": []}


def test_gen_almost_tree_over_a_path_is_infeasible(capsys, tmp_path):
    # with d = 2 and seed 0 the 4-vertex tree comes out as a path
    code, _, err = run_cli(capsys, "gen", "--family", "almost_tree", "--n", 4, "--d", 2, "--seed", 0,
                           "--out", tmp_path / "p.json")
    assert code == 2
    assert "generation-infeasible" in err
    assert not (tmp_path / "p.json").exists()


def test_gen_hybrid_accepts_symbolic_height(capsys, tmp_path):
    out = tmp_path / "h.json"
    code, _, _ = run_cli(capsys, "gen", "--family", "hybrid", "--n", 64, "--d", 2, "--h", "log:3", "--out", out)
    assert code == 0
    meta = json.loads((tmp_path / "h.meta.json").read_text())
    assert 18 <= meta["h"] <= 18 + 6 + 1


def test_gen_bad_arguments(capsys, tmp_path):
    assert run_cli(capsys, "gen", "--family", "forest", "--n", 5, "--out", tmp_path / "x.json")[0] == 2
    assert run_cli(capsys, "gen", "--family", "caterpillar", "--n", 7, "--out", tmp_path / "x.json")[0] == 2
    assert run_cli(capsys, "gen", "--family", "scc", "--n", 5, "--k", 9, "--out", tmp_path / "x.json")[0] == 2


# -- learn ----------------------------------------------------------------------


def test_learn_a1(capsys, a1, a1_file, tmp_path):
    transcript = tmp_path / "t.txt"
    code, out, _ = run_cli(capsys, "learn", a1_file, "--algo", "almost_tree", "--transcript", transcript)
    assert code == 0
    payload = json.loads(out)
    assert payload["record"]["success"] is True
    assert {tuple(e) for e in payload["output"]["edges"]} == a1.edges
    lines = transcript.read_text().splitlines()
    assert len(lines) == payload["record"]["total_queries"]
    assert all(len(line.split(",")) == 4 for line in lines)
    assert sum(payload["record"]["phase_queries"].values()) == payload["record"]["total_queries"]


def test_learn_g2_scc(capsys, g2_file):
    code, out, _ = run_cli(capsys, "learn", g2_file, "--algo", "scc")
    assert code == 0
    payload = json.loads(out)
    assert payload["record"]["success"] is True
    assert sorted(map(sorted, payload["output"]["components"])) == [[0, 1], [2]]


def test_learn_a1_as_scc(capsys, a1, a1_file):
    code, out, _ = run_cli(capsys, "learn", a1_file, "--algo", "scc")
    assert code == 0
    output = json.loads(out)["output"]
    comps = output["components"]
    assert all(len(c) == 1 for c in comps) and len(comps) == 7
    learned = {(comps[i][0], comps[j][0]) for i, j in output["condensation_edges"]}
    assert learned == a1.edges


def test_learn_promise_violation_is_reported(capsys, g2_file):
    code, out, _ = run_cli(capsys, "learn", g2_file, "--algo", "almost_tree")
    assert code == 1
    record = json.loads(out)["record"]
    assert record["success"] is False and record["error"]


def test_learn_writes_output(capsys, a1, a1_file, tmp_path):
    dest = tmp_path / "learned.json"
    assert run_cli(capsys, "learn", a1_file, "--algo", "almost_tree", "--out", dest)[0] == 0
    learned = json.loads(dest.read_text())
    assert {tuple(e) for e in learned["edges"]} == a1.edges
    assert learned["cross_edge"] in ([3, 5], [2, 5])


def test_learn_replay_is_identical(capsys, tmp_path):
    path = tmp_path / "g.json"
    run_cli(capsys, "gen", "--family", "almost_tree", "--n", 90, "--seed", 4, "--out", path)
    records = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "learn", path, "--algo", "almost_tree", "--seed", 17)
        rec = json.loads(out)["record"]
        rec.pop("wall_ms")
        records.append(rec)
    assert records[0] == records[1]


def test_learn_missing_file(capsys, tmp_path):
    assert run_cli(capsys, "learn", tmp_path / "nope.json", "--algo", "scc")[0] == 2


# -- verify -----------------------------------------------------------------------


def test_verify_a1(capsys, a1_file):
    code, out, _ = run_cli(capsys, "verify", a1_file)
    assert code == 0
    cert = json.loads(out)["certificate"]
    assert cert["extra_edge"] == [3, 5] and cert["height"] == 4 and cert["max_degree"] == 3


def test_verify_transitive_edge(capsys, t1, tmp_path):
    path = tmp_path / "bad.json"
    t1.with_edge(0, 3).save(path)
    code, out, _ = run_cli(capsys, "verify", path)
    assert code == 1 and json.loads(out)["reason"] == "transitive-extra-edge"


def test_verify_cycle(capsys, tmp_path):
    path = tmp_path / "cyc.json"
    path.write_text(json.dumps({"n": 3, "root": 0, "edges": [[0, 1], [1, 2], [2, 1]]}))
    code, out, _ = run_cli(capsys, "verify", path)
    assert code == 1 and json.loads(out)["reason"] == "cycle-created"


def test_verify_unreachable_root(capsys, tmp_path):
    path = tmp_path / "nr.json"
    path.write_text(json.dumps({"n": 3, "root": 0, "edges": [[0, 1]]}))
    code, out, _ = run_cli(capsys, "verify", path)
    assert code == 1 and json.loads(out)["reason"] == "not-rooted"


def test_verify_scc_promise(capsys, g2_file, tmp_path):
    code, out, _ = run_cli(capsys, "verify", g2_file)
    assert code == 0 and json.loads(out)["promise_holds"] is True
    path = tmp_path / "tr.json"
    path.write_text(json.dumps({"n": 3, "root": None, "edges": [[0, 1], [1, 2], [0, 2]]}))
    code, out, _ = run_cli(capsys, "verify", path)
    assert code == 1 and json.loads(out)["promise_holds"] is False


def test_verify_unreadable(capsys, tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    assert run_cli(capsys, "verify", path)[0] == 2
    assert run_cli(capsys, "verify", tmp_path / "missing.json")[0] == 2


# -- bench --------------------------------------------------------------------------


def test_bench_csv_schema_round_trip(capsys, tmp_path):
    out = tmp_path / "b.csv"
    code, stdout, _ = run_cli(capsys, "bench", "--family", "almost_tree", "--n", "20,40", "--n", 60,
                              "--seeds-per-cell", 2, "--out", out)
    assert code == 0
    with open(out, newline="") as fh:
        reader = csv.reader(fh)
        assert tuple(next(reader)) == CSV_COLUMNS
        assert len(list(reader)) == 6
    records = read_csv(out)
    for r in records:
        assert r.success and r.algo == "almost_tree"
        assert r.phase("root") + r.phase("layered") + r.phase("cross") == r.total_queries
        assert r.norm_tree is not None and r.norm_scc is None
    summary = json.loads(stdout)
    assert [c["n"] for c in summary["cells"]] == [20, 40, 60]


def test_bench_scc_rows(capsys, tmp_path):
    out = tmp_path / "s.csv"
    assert run_cli(capsys, "bench", "--family", "scc", "--n", "30,60", "--k", "sqrt",
                   "--seeds-per-cell", 2, "--out", out)[0] == 0
    for r in read_csv(out):
        assert r.k == 6 if r.n == 30 else r.k == 8
        assert r.norm_scc == pytest.approx(r.total_queries / (r.n * r.k), rel=1e-5)


def test_bench_empty_grid(capsys, tmp_path):
    assert run_cli(capsys, "bench", "--family", "tree", "--n", ",", "--out", tmp_path / "e.csv")[0] == 2


def test_bench_failure_exits_one(capsys, tmp_path, monkeypatch):
    real = bench_mod.run_experiment

    def sabotage(*args, **kw):
        out = real(*args, **kw)
        out.record.success = False
        return out

    monkeypatch.setattr(bench_mod, "run_experiment", sabotage)
    out = tmp_path / "f.csv"
    assert run_cli(capsys, "bench", "--family", "tree", "--n", 10, "--seeds-per-cell", 2, "--out", out)[0] == 1
    assert len(read_csv(out)) == 2


def test_read_csv_rejects_other_headers(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_csv(path)


@pytest.mark.parametrize("family,kw", [
    ("caterpillar", {}), ("hybrid", {"d": 2, "h": "log:3"}), ("scc", {"k": "sqrt"}), ("almost_tree", {"d": 4}),
])
def test_csv_row_replays_bit_identically(tmp_path, family, kw):
    records = bench_mod.bench(family, [40, 64], 3, base_seed=11, **kw)
    bench_mod.write_csv(records, tmp_path / "r.csv")
    for parsed, original in zip(read_csv(tmp_path / "r.csv"), records):
        first, second = bench_mod.rerun(parsed), bench_mod.rerun(parsed)
        assert first.digest == second.digest
        assert first.record.total_queries == original.total_queries
        assert first.record.seed == original.seed


def test_parallel_grid_matches_serial():
    serial = bench_mod.bench("almost_tree", [30, 60], 2, base_seed=3)
    parallel = bench_mod.bench("almost_tree", [30, 60], 2, base_seed=3, jobs=2)
    assert [r.to_dict(wall=False) for r in serial] == [r.to_dict(wall=False) for r in parallel]


def test_row_seeds_are_distinct():
    seeds = {row_seed(0, "tree", n, rep) for n in (10, 20) for rep in range(50)}
    assert len(seeds) == 100


def test_resolve_param():
    assert resolve_param("log:3", 64) == 18
    assert resolve_param("sqrt", 50) == 8
    assert resolve_param("n", 12) == 12
    assert resolve_param("7", 12) == 7
    assert resolve_param(None, 12) is None


def test_record_phase_sum(a1):
    rec = run_experiment(a1, "almost_tree", seed=2).record
    assert isinstance(rec, ExperimentRecord)
    assert sum(rec.phase_queries.values()) == rec.total_queries


# -- scaling examples ----------------------------------------------------------------


def median_ratios(family, sizes, seeds, **kw):
    summary = bench_mod.summarize(bench_mod.bench(family, sizes, seeds, **kw))
    assert all(c["failures"] == 0 for c in summary["cells"])
    return [r["ratio"] for r in summary["ratios"]]


def test_dary_doubling_ratio():
    assert all(r <= 3.0 for r in median_ratios("kary", [128, 256, 512], 5, d=3))


@pytest.mark.parametrize("k", [1, 4])
def test_scc_doubling_ratio(k):
    assert all(1.5 <= r <= 2.5 for r in median_ratios("scc", [100, 200, 400], 15, k=k))


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "pathquery", "gen", "--family", "tree", "--n", "5",
                           "--out", str(tmp_path / "t.json")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert DirectedGraph.load(tmp_path / "t.json").n == 5
