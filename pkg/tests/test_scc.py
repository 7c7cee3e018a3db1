import numpy as np
import pytest

from pathquery.errors import PromiseViolation
from pathquery.generators import GenSpec, gen_scc
from pathquery.graph import DirectedGraph, strongly_connected_components
from pathquery.oracle import QueryOracle
from pathquery.scc import learn_condensation, learn_partition, learn_scc, query_budget


def test_g2_partition(g2):
    o = QueryOracle(g2)
    comps = learn_partition(o)
    assert set(comps) == {frozenset({0, 1}), frozenset({2})}
    # 1 matches rep 0 with two queries; 2 fails its first query against rep 0
    assert o.total_queries == 3 <= 2 * 3 * 2


def test_g2_condensation(g2):
    o = QueryOracle(g2)
    comps = [frozenset({0, 1}), frozenset({2})]
    assert learn_condensation(o, comps) == {(0, 1)}
    assert o.total_queries == 2


def test_dag_gives_singletons(a1):
    comps = learn_partition(QueryOracle(a1))
    assert sorted(map(sorted, comps)) == [[u] for u in range(7)]


@pytest.mark.parametrize("n", [2, 5, 17])
def test_cycle_costs_two_per_vertex(n):
    g = DirectedGraph(n, frozenset((i, (i + 1) % n) for i in range(n)))
    o = QueryOracle(g)
    assert learn_partition(o) == [frozenset(range(n))]
    assert o.total_queries == 2 * (n - 1)


def test_single_component_condensation_is_free():
    o = QueryOracle(DirectedGraph(3, frozenset({(0, 1), (1, 2), (2, 0)})))
    assert learn_condensation(o, [frozenset({0, 1, 2})]) == frozenset()
    assert o.total_queries == 0


def test_chain_drops_transitive_pair():
    g = DirectedGraph(3, frozenset({(0, 1), (1, 2)}))
    part = learn_scc(QueryOracle(g))
    assert part.set_edges() == {(frozenset({0}), frozenset({1})), (frozenset({1}), frozenset({2}))}


def test_wrong_partition_is_a_promise_violation(g2):
    with pytest.raises(PromiseViolation):
        learn_condensation(QueryOracle(g2), [frozenset({0}), frozenset({1}), frozenset({2})])


@pytest.mark.parametrize("seed", range(30))
def test_exact_and_within_budget(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 120))
    k = int(rng.integers(1, n + 1))
    g = gen_scc(GenSpec("scc", n, k=k, seed=seed))
    o = QueryOracle(g)
    learned = learn_scc(o)
    assert learned.same_as(strongly_connected_components(g))
    assert o.total_queries <= query_budget(n, k)
    assert o.total_queries == o.phase_total("partition") + o.phase_total("condensation")


@pytest.mark.parametrize("seed", range(10))
def test_scan_order_does_not_change_the_partition(seed):
    g = gen_scc(GenSpec("scc", 60, k=7, seed=seed))
    base = set(learn_partition(QueryOracle(g)))
    order = np.random.default_rng(seed).permutation(60).tolist()
    assert set(learn_partition(QueryOracle(g), order=order)) == base
