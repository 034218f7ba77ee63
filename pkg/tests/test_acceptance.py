"""End-to-end acceptance checks, one test per criterion.

Each test appends a PASS/FAIL line to ``ACCEPTANCE_LINES``; the lines are
printed in a summary section at the end of the pytest run.
"""

import itertools
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, all_structures, brute_force_distances, closure_components
from wgrecon.gen import gen_graph
from wgrecon.graph import WeightedGraph, components, layer
from wgrecon.harness import (
    ExperimentConfig,
    TrialPoint,
    lemma_stats,
    qd_indistinguishability_demo,
    run_experiment,
    run_trial,
    trial_seed,
)
from wgrecon.oracle import OracleSession
from wgrecon.recon import find_connected_components

C1_N = [16, 32, 64, 128, 256, 512]
C1_D = list(range(3, 11))
C1_ALPHA = [1.5, 2.0, 3.0]
C6_N = [256, 512, 1024, 2048, 4096]


def report(tag, ok, detail):
    ACCEPTANCE_LINES.append(f"[{tag}] {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def c1_points():
    # full grid (288 points) then the first 12 again with fresh seeds
    grid = list(itertools.product(C1_N, C1_D, C1_ALPHA, ["connected", "multi-component"]))
    grid += grid[:12]
    pts = []
    for i, (n, d, a, structure) in enumerate(grid):
        k = 1 if structure == "connected" else 2 + i % 5
        pts.append(TrialPoint("lbl_r", n, d, a, structure, k))
    return pts


@pytest.fixture(scope="module")
def c1_run():
    t0 = time.perf_counter()
    recs = [run_trial(p, trial_seed(101, i), trial=i) for i, p in enumerate(c1_points())]
    return recs, time.perf_counter() - t0


@pytest.fixture(scope="module")
def c2_run():
    recs = []
    for i in range(100):
        n = [32, 64, 128, 256][i % 4]
        D = [3, 4][(i // 4) % 2]
        cap = [2.0, 2.5, 3.0][(i // 8) % 3]
        kind = "uniform-truncated" if i % 2 else "pareto"
        recs.append(run_trial(TrialPoint("nt_r", n, D, 2.0, weight_kind=kind, w_cap=cap), trial_seed(202, i), trial=i))
    return recs


@pytest.fixture(scope="module")
def c6_run():
    t0 = time.perf_counter()
    cfg = ExperimentConfig("lbl_r", C6_N, d_values=[4], alpha_values=[2.0], trials=20, seed=606)
    records, summary = run_experiment(cfg)
    return records, summary, time.perf_counter() - t0


def test_c1_exact_reconstruction(c1_run):
    recs, secs = c1_run
    exact = sum(r.exact for r in recs)
    combos = {(r.n, r.dmax, r.alpha, r.structure) for r in recs}
    ok = exact == len(recs) == 300 and secs < 300
    report("C1", ok, f"lbl_r exact {exact}/{len(recs)} over {len(combos)} (n,D,alpha,structure) points in {secs:.0f}s (< 300s)")
    assert exact == 300
    assert secs < 300


def test_c2_ntr_exactness(c2_run):
    recs = c2_run
    exact = sum(r.exact for r in recs)
    uncovered = sum(r.cover_violations for r in recs)
    ok = exact == 100 and uncovered == 0 and all(r.status == "ok" for r in recs)
    report("C2", ok, f"nt_r exact {exact}/100, edges outside every G[D_a]: {uncovered}")
    assert ok


def test_c3_layer_coverage(c1_run, c2_run, c6_run):
    recs = c1_run[0] + c6_run[0]
    bad = sum(r.coverage_violations + r.frontier_violations for r in recs)
    bad += sum(r.cover_violations for r in c2_run)
    report("C3", bad == 0, f"band-coverage violations across {len(recs)} lbl_r and {len(c2_run)} nt_r runs: {bad}")
    assert bad == 0


def test_c4_oracle_soundness():
    checks = mismatches = 0
    seed = 0
    while checks < 1_000_000:
        r = run_trial(TrialPoint("lbl_r", 256, 4, 1.5, "multi-component", 3), trial_seed(404, seed), shadow=True)
        assert r.exact
        checks += r.shadow_checks
        mismatches += r.shadow_mismatches
        seed += 1

    # small instances: every structure for n <= 5, a random sample of structures for n = 6, 7
    rng = np.random.default_rng(44)
    graphs = []
    for n in range(1, 6):
        for pairs in all_structures(n):
            graphs.append(WeightedGraph(n, [(u, v, float(rng.integers(1, 9)) / 2 + 0.5) for u, v in pairs]))
    for n in (6, 7):
        pairs = list(itertools.combinations(range(n), 2))
        for _ in range(400):
            mask = rng.random(len(pairs)) < rng.random()
            graphs.append(WeightedGraph(n, [(u, v, float(rng.uniform(1, 8))) for (u, v), m in zip(pairs, mask) if m]))
    small_bad = 0
    for G in graphs:
        s = OracleSession(G)
        for thr in (1.0, 2.5, 4.0):
            D = s.batch_query("q_d", range(G.n), range(G.n), thr)
            for u in range(G.n):
                small_bad += D[u].tolist() != brute_force_distances(G.n, G.edges, u, thr)
            comps = closure_components(G.n, G.edges, thr)
            label = {v: i for i, c in enumerate(comps) for v in c}
            for u in range(G.n):
                for v in range(G.n):
                    if u != v:
                        small_bad += s.q_c(u, [v], thr) != (label[u] == label[v])
                        small_bad += s.q_w(u, v, thr) != (G.weight(u, v) if G.weight(u, v) >= thr else 0)
    ok = checks >= 1_000_000 and mismatches == 0 and small_bad == 0
    report("C4", ok, f"shadow checks {checks} with {mismatches} mismatches; {len(graphs)} small graphs, {small_bad} disagreements")
    assert ok


def test_c5_query_accounting(c1_run):
    ex_bad = 0
    for n in (2, 17, 40, 100, 333):
        r = run_trial(TrialPoint("exhaustive", n, 4), trial_seed(505, n))
        ex_bad += r.qw != n * (n - 1) // 2 or r.total != r.qw or not r.exact
    runs = bound_bad = exact_bad = 0
    for i, p in enumerate(c1_points()[:120]):
        G = gen_graph(p.instance_spec(trial_seed(101, i)))
        for j in range(4):
            thr = 2.0**j
            s = OracleSession(G)
            comps = find_connected_components(s, range(G.n), thr)
            k = len(comps)
            assert sorted(c.tolist() for c in comps) == sorted(components(layer(G, thr)))
            q = s.ledger.counts["q_c"]
            bound_bad += q > G.n * (1 + math.ceil(math.log2(k)))
            exact_bad += k == 1 and q != G.n - 1
            runs += 1
    ok = ex_bad == 0 and bound_bad == 0 and exact_bad == 0
    report("C5", ok, f"exhaustive count errors {ex_bad}; q_c bound violations {bound_bad}/{runs}; k=1 count errors {exact_bad}")
    assert ok


def test_c6a_subquadratic_slope(c6_run):
    records, summary, secs = c6_run
    g = summary["groups"][0]
    slope = g["loglog_slope"]
    ok = slope <= 1.85 and all(r.exact for r in records) and secs < 900
    med = ", ".join(f"{n}:{m:.0f}" for n, m in zip(g["n"], g["median_total"]))
    report("C6a", ok, f"log-log slope {slope:.3f} (<= 1.85) in {secs:.0f}s (< 900s); medians {med}")
    assert slope <= 1.85
    assert secs < 900


def test_c6b_below_exhaustive_at_4096(c6_run):
    g = c6_run[1]["groups"][0]
    med = g["median_total"][g["n"].index(4096)]
    cap = 4096 * 4095 // 2
    ok = med < cap
    report("C6b", ok, f"median total at n=4096 {med:.0f} vs n(n-1)/2 = {cap}")
    assert med < cap


def test_c7_early_termination():
    rep = lemma_stats("early_termination", {"n": 4096, "d": 8, "alpha": 2, "run": 50}, 50, seed=707)
    s = rep.summary
    ok = s["frac_early"] >= 0.9 and s["confirmed_by_run"] == 50
    report("C7", ok, f"break < floor(log2 W_max) in {s['frac_early']:.2f} of 50 runs; break_iter {s['break_hist']}, "
                     f"floor(log2 W_max) {s['last_hist']}")
    assert ok


def test_c8_largest_component():
    rep = lemma_stats("largest_component", {"n": 5000, "d": 8, "alpha": 2, "dp": 0.5}, 100, seed=808)
    s = rep.summary
    ok = s["frac_within"] >= 0.95
    report("C8", ok, f"largest component <= {s['bound']:.1f} in {s['frac_within']:.2f} of 100 trials (max {s['max']})")
    assert ok


def test_c9_wmax_tail():
    rep = lemma_stats("wmax", {"m": 100_000, "alpha": 2, "d": 16, "c": 2}, 1000, seed=909)
    s = rep.summary
    ok = s["w_star"] == 4.0 and s["p_exceed"] >= 0.99
    report("C9", ok, f"P(W_max > {s['threshold']:g}) = {s['p_exceed']:.3f} over 1000 trials (min W_max {s['min_wmax']:.1f})")
    assert ok


def test_c10_qd_insufficiency():
    rep = qd_indistinguishability_demo()
    ok = rep.identical_at_1 and rep.distinguished and rep.transitive
    report("C10", ok, "q_d tables at threshold 1 identical; q_w(a,c,1) gives "
                      f"{rep.qw_probe[0]:g} vs {rep.qw_probe[1]:g}")
    assert ok
