import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import weighted_graphs
from wgrecon.errors import GaveUp
from wgrecon.gen import InstanceSpec, WeightModel, gen_graph
from wgrecon.graph import WeightedGraph, components, layer, shortest_paths
from wgrecon.oracle import OracleSession
from wgrecon.recon import (
    default_s,
    estimated_centers,
    exhaustive_query,
    find_connected_components,
    find_neighbors,
    lbl_r,
    quarter_root_ceil,
    reconstruct,
    reconstruct_sub,
    sample,
)


def rng(seed=0):
    return np.random.default_rng(seed)


def band(G, thr, V=None):
    """Edges inside V with weight in [thr, 2 thr)."""
    keep = None if V is None else set(int(v) for v in V)
    return {
        e: w for e, w in G.edges.items()
        if thr <= w < 2 * thr and (keep is None or (e[0] in keep and e[1] in keep))
    }


def assert_sound(G, found):
    for e, w in found.items():
        assert G.edges[e] == w


@pytest.mark.parametrize("n,want", [(1, 1), (2, 2), (16, 2), (17, 3), (81, 3), (82, 4), (4096, 8)])
def test_quarter_root(n, want):
    assert quarter_root_ceil(n) == want


def test_sample_small_set_is_identity():
    W = np.arange(5)
    assert sample(W, 10, rng()).tolist() == W.tolist()
    assert len(sample(W, 0, rng())) == 0


def test_sample_mean():
    W = np.arange(10_000)
    sizes = [len(sample(W, 100, rng(s))) for s in range(1000)]
    assert abs(np.mean(sizes) - 100) <= 10


def test_exhaustive_query_counts_and_edges():
    G = WeightedGraph(20, [(0, 1, 2.0), (1, 2, 3.0), (4, 9, 6.5), (5, 6, 1.0)])
    s = OracleSession(G)
    assert exhaustive_query(s, [3], 1) == {}
    assert s.ledger.cumulative_total == 0
    found = exhaustive_query(s, range(20), 2)
    assert s.ledger.counts["q_w"] == 190
    assert found == {(0, 1): 2.0, (1, 2): 3.0, (4, 9): 6.5}


def test_find_components_examples():
    G = WeightedGraph(3, [(0, 1, 1.0), (1, 2, 3.0)])
    s = OracleSession(G)
    got = find_connected_components(s, range(3), 2)
    assert [c.tolist() for c in got] == [[0], [1, 2]]
    s = OracleSession(WeightedGraph(6))
    got = find_connected_components(s, range(6), 1)
    assert [c.tolist() for c in got] == [[v] for v in range(6)]
    assert s.ledger.counts["q_c"] == 5


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 150), st.integers(1, 12), st.integers(0, 2**32 - 1), st.sampled_from([1.0, 2.0, 4.0]))
def test_find_components_matches_truth_within_query_bound(n, k, seed, thr):
    k = min(k, n)
    G = gen_graph(InstanceSpec(n, 4, "multi-component", k, seed=seed))
    s = OracleSession(G)
    got = [c.tolist() for c in find_connected_components(s, range(n), thr)]
    truth = components(layer(G, thr))
    assert sorted(got) == sorted(truth)
    kk = len(truth)
    q = s.ledger.counts["q_c"]
    assert q <= n * (1 + math.ceil(math.log2(kk)))
    if kk == 1:
        assert q == n - 1


def test_find_components_on_subset():
    G = gen_graph(InstanceSpec(80, 3, seed=5))
    V = np.arange(0, 80, 2)
    s = OracleSession(G)
    got = find_connected_components(s, V, 1)
    assert sorted(np.concatenate(got).tolist()) == V.tolist()


def test_find_neighbors_examples():
    star = WeightedGraph(5, [(0, v, 1.0) for v in range(1, 5)])
    s = OracleSession(star)
    assert find_neighbors(s, range(5), 0, 1).tolist() == [0, 1, 2, 3, 4]
    path = WeightedGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
    assert find_neighbors(OracleSession(path), range(4), 0, 1).tolist() == [0, 1, 2]
    lone = WeightedGraph(3, [(1, 2, 1.0)])
    assert find_neighbors(OracleSession(lone), range(3), 0, 1).tolist() == [0]


@settings(max_examples=50, deadline=None)
@given(weighted_graphs(max_n=10), st.sampled_from([1.0, 3.0]))
def test_find_neighbors_is_two_hop_ball(G, thr):
    s = OracleSession(G)
    for a in range(G.n):
        hops = shortest_paths(layer(G, thr), a).hops
        want = np.flatnonzero(hops <= 2).tolist()
        assert find_neighbors(s, range(G.n), a, thr).tolist() == want


def test_centers_absorb_small_sets():
    G = gen_graph(InstanceSpec(30, 3, seed=1))
    st_ = estimated_centers(OracleSession(G), range(30), 40, 1, rng())
    assert sorted(st_.centers.tolist()) == list(range(30))
    assert np.all(st_.dist_to_centers == 0)
    assert all(np.all(e == 0) for e in st_.removal_estimates)


def test_centers_size_and_exit_condition():
    n, s_ = 400, 2.0
    G = gen_graph(InstanceSpec(n, 4, seed=2))
    small = 0
    for seed in range(20):
        st_ = estimated_centers(OracleSession(G), range(n), s_, 1, rng(seed))
        small += len(st_.centers) <= 12 * s_ * math.log(n)
        est = np.concatenate(st_.removal_estimates)
        assert np.all(est < 5 * n / s_)
        # every vertex was a candidate once and left exactly once
        assert len(est) == n
    assert small >= 5


def test_centers_distance_rows_match_truth():
    G = gen_graph(InstanceSpec(60, 4, seed=3))
    st_ = estimated_centers(OracleSession(G), range(60), 8, 1, rng())
    for a, row in zip(st_.centers, st_.rows):
        assert np.allclose(row, shortest_paths(G, int(a)).dist, rtol=1e-12)
    assert np.allclose(st_.dist_to_centers, st_.rows.min(axis=0))


def test_reconstruct_sub_examples():
    G = WeightedGraph(4, [(0, 1, 2.0), (1, 2, 3.0), (2, 3, 5.0)])
    out = reconstruct_sub(OracleSession(G), range(4), 2, rng())
    assert {(0, 1): 2.0, (1, 2): 3.0}.items() <= out.items()
    assert_sound(G, out)

    light = gen_graph(InstanceSpec(60, 4, weight_model=WeightModel("uniform-truncated", 2.0, 1.99), seed=4))
    assert reconstruct_sub(OracleSession(light), range(60), 1, rng()) == light.edges

    pair = WeightedGraph(2, [(0, 1, 2.0)])
    assert reconstruct_sub(OracleSession(pair), [0, 1], 2, rng()) == {(0, 1): 2.0}


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 120), st.integers(2, 6), st.integers(0, 2**32 - 1), st.sampled_from([1.0, 2.0]))
def test_reconstruct_sub_covers_band(n, d, seed, thr):
    G = gen_graph(InstanceSpec(n, d, weight_model=WeightModel("pareto", 1.5), seed=seed))
    s = OracleSession(G)
    for c in components(layer(G, thr)):
        out = reconstruct_sub(s, c, thr, rng(seed))
        assert_sound(G, out)
        assert band(G, thr, c).items() <= out.items()


def test_default_s():
    G = gen_graph(InstanceSpec(100, 5, seed=0))
    s = OracleSession(G)
    assert default_s(s, 100) == G.max_degree * 10


def test_reconstruct_restarts_under_tiny_budget():
    G = gen_graph(InstanceSpec(80, 4, weight_model=WeightModel("pareto", 2.0), seed=6))
    s = OracleSession(G)
    log = []
    out = reconstruct(s, range(80), 1, rng(), budget=[50, None], log=log)
    assert log[0].attempts == 2
    assert s.ledger.attempt_index == 2
    assert s.ledger.cumulative_total >= s.ledger.attempt_total
    # a batch that would cross the limit is refused before it is issued
    assert all(h <= 50 for h in s.ledger.attempt_history)
    assert band(G, 1).items() <= out.items()


def test_reconstruct_single_attempt_matches_sub():
    G = gen_graph(InstanceSpec(70, 3, seed=8))
    a = reconstruct(OracleSession(G), range(70), 1, rng(3), log=(log := []))
    b = reconstruct_sub(OracleSession(G), range(70), 1, rng(3))
    assert a == b
    assert log[0].attempts == 1


def test_reconstruct_gives_up():
    G = gen_graph(InstanceSpec(50, 3, seed=8))
    s = OracleSession(G)
    with pytest.raises(GaveUp):
        reconstruct(s, range(50), 1, rng(), budget=5, max_attempts=3)
    assert s.ledger.attempt_index == 3
    assert s.ledger.cumulative_total <= 15


def test_lbl_r_examples(triangle_transitive):
    res = lbl_r(OracleSession(WeightedGraph(6)), rng=rng())
    assert res.edges == {}
    assert res.break_iteration == 0 and res.broke

    path = WeightedGraph(4, [(0, 1, 1.0), (1, 2, 2.5), (2, 3, 7.0)])
    assert lbl_r(OracleSession(path), rng=rng()).edges == path.edges

    assert lbl_r(OracleSession(triangle_transitive), rng=rng()).edges == triangle_transitive.edges


@settings(max_examples=40, deadline=None)
@given(weighted_graphs(max_n=12), st.integers(0, 1000))
def test_lbl_r_exact_on_small_graphs(G, seed):
    assert lbl_r(OracleSession(G), rng=rng(seed)).edges == G.edges


@pytest.mark.parametrize("structure,k", [("connected", 1), ("multi-component", 4)])
def test_lbl_r_exact_on_generated(structure, k):
    for seed in range(4):
        G = gen_graph(InstanceSpec(150, 5, structure, k, WeightModel("pareto", 1.5), seed))
        s = OracleSession(G)
        res = lbl_r(s, rng=rng(seed))
        assert res.edges == G.edges
        assert res.ledger["cumulative_total"] == s.ledger.cumulative_total
        assert res.iterations[0].thr == 1.0
        assert [it.j for it in res.iterations] == list(range(len(res.iterations)))
