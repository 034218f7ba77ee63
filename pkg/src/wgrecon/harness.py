"""Monte-Carlo trials, lemma statistics and the distance-query demo.

Trials run in simulation, so the hidden graph is available for verification
after the algorithm finishes: exactness, per-call layer coverage, the
iteration frontier and (for NT-R) the cell cover are all checked here,
never inside the algorithms.
"""

from __future__ import annotations

import csv
import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from wgrecon.errors import GaveUp, Unsupported
from wgrecon.gen import InstanceSpec, WeightModel, critical_threshold, floor_log2, gen_graph, pareto_sample
from wgrecon.graph import WeightedGraph, components, is_transitive_edge, layer, shortest_paths
from wgrecon.ntr import ball_params, nt_r
from wgrecon.oracle import OracleSession
from wgrecon.recon import (
    C_Q_DEFAULT,
    K_DEFAULT,
    ReconstructionResult,
    exhaustive_query,
    lbl_r,
    quarter_root_ceil,
)

ALGORITHMS = ("lbl_r", "nt_r", "exhaustive")
CSV_COLUMNS = (
    "trial", "algo", "n", "m", "dmax", "alpha", "seed", "qw", "qd", "qc",
    "total", "attempts", "break_iter", "wmax", "wstar", "exact", "ms",
)


@dataclass(frozen=True)
class TrialPoint:
    """One configuration of the sweep; a seed turns it into a trial."""

    algo: str
    n: int
    dmax: int
    alpha: float = 2.0
    structure: str = "connected"
    k: int = 1
    weight_kind: str = "pareto"
    w_cap: float | None = None
    K: float = K_DEFAULT
    c_q: float = C_Q_DEFAULT
    s_factor: float = 1.0

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}")
        if self.algo == "nt_r" and self.structure != "connected":
            raise Unsupported("NT-R needs connected instances")

    def instance_spec(self, seed: int) -> InstanceSpec:
        wm = WeightModel(self.weight_kind, self.alpha, self.w_cap)
        return InstanceSpec(self.n, self.dmax, self.structure, self.k, wm, seed)


@dataclass
class TrialRecord:
    trial: int
    algo: str
    n: int
    m: int
    dmax: int
    alpha: float
    seed: int
    qw: int
    qd: int
    qc: int
    total: int
    attempts: int
    break_iter: int | None
    wmax: float
    wstar: float
    exact: bool
    ms: float
    status: str = "ok"
    structure: str = "connected"
    largest: list[int] = field(default_factory=list)
    coverage_violations: int = 0
    frontier_violations: int = 0
    cover_violations: int = 0
    ball_violations: int = 0
    shadow_checks: int = 0
    shadow_mismatches: int = 0
    cumulative_total: int = 0

    def csv_row(self) -> dict:
        row = {c: getattr(self, c) for c in CSV_COLUMNS}
        row["break_iter"] = "" if self.break_iter is None else self.break_iter
        row["exact"] = str(self.exact).lower() if self.status == "ok" else self.status
        row["wmax"] = repr(self.wmax)
        row["wstar"] = repr(self.wstar)
        row["ms"] = f"{self.ms:.1f}"
        return row


# -- instrumentation ----------------------------------------------------------


def coverage_violations(G: WeightedGraph, result: ReconstructionResult) -> int:
    """Edges of weight in ``[thr, 2 thr)`` inside a covered component but missed."""
    bad = 0
    for rec in result.sub_calls:
        inside = set(rec.vertices.tolist())
        for (u, v), w in G.edges.items():
            if rec.thr <= w < 2 * rec.thr and u in inside and v in inside:
                bad += (u, v) not in rec.edges
    return bad


def frontier_violations(G: WeightedGraph, result: ReconstructionResult) -> int:
    """Edges lighter than ``2**j`` not yet found when iteration ``j`` starts."""
    bad = 0
    known: set = set()
    for it in result.iterations:
        bad += sum(1 for e, w in G.edges.items() if w < it.thr and e not in known)
        known |= it.edges.keys()
    return bad


def cell_cover_violations(G: WeightedGraph, result: ReconstructionResult) -> int:
    """Edges of ``G`` with no extended cell holding both endpoints."""
    rec = result.sub_calls[0]
    if rec.cells is None:
        raise ValueError("run with keep_cells=True")
    owner: dict[int, set[int]] = {}
    for i, Da in enumerate(rec.cells):
        for v in Da.tolist():
            owner.setdefault(v, set()).add(i)
    return sum(1 for u, v in G.edges if not owner.get(u, set()) & owner.get(v, set()))


def predicted_break_iteration(G: WeightedGraph) -> tuple[int, bool]:
    """Where the layer sweep stops, from exact components of each layer."""
    cutoff = quarter_root_ceil(G.n)
    last = floor_log2(G.w_max)
    for j in range(last + 1):
        if max(len(c) for c in components(layer(G, 2.0**j))) <= cutoff:
            return j, True
    return last, False


# -- trials -------------------------------------------------------------------


def algo_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng([seed, 1])


def trial_seed(base_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1)[0])


def run_trial(
    point: TrialPoint,
    seed: int,
    *,
    trial: int = 0,
    graph: WeightedGraph | None = None,
    shadow: bool = False,
    instrument: bool = True,
) -> TrialRecord:
    """Generate (or take) an instance, reconstruct it and verify the result."""
    G = gen_graph(point.instance_spec(seed)) if graph is None else graph
    session = OracleSession(G, shadow=shadow)
    rng = algo_rng(seed)
    D = G.max_degree
    wstar = critical_threshold(point.dmax, point.alpha) if point.dmax > 0 else 1.0
    rec = TrialRecord(
        trial, point.algo, G.n, G.m, point.dmax, point.alpha, seed,
        0, 0, 0, 0, 0, None, G.w_max, wstar, False, 0.0, structure=point.structure,
    )
    t0 = time.perf_counter()
    result = None
    try:
        if point.algo == "exhaustive":
            edges = exhaustive_query(session, np.arange(G.n), 1.0)
            result = ReconstructionResult(edges, session.ledger.snapshot())
        elif point.algo == "lbl_r":
            result = lbl_r(session, rng=rng, K=point.K, c_q=point.c_q, s_factor=point.s_factor)
            rec.break_iter = result.break_iteration
            rec.largest = [it.largest for it in result.iterations]
        else:
            if len(components(G)) > 1:
                raise Unsupported("NT-R needs a connected instance")
            ball_params(G.n, D, G.w_max)  # overflow guard
            result = nt_r(session, rng=rng, K=point.K, c_q=point.c_q, keep_cells=instrument)
    except GaveUp:
        rec.status = "gave-up"
    except Unsupported:
        rec.status = "unsupported"
    rec.ms = (time.perf_counter() - t0) * 1e3

    led = session.ledger
    rec.qw, rec.qd, rec.qc = led.counts["q_w"], led.counts["q_d"], led.counts["q_c"]
    rec.total = rec.cumulative_total = led.cumulative_total
    rec.shadow_checks, rec.shadow_mismatches = session.shadow_checks, session.shadow_mismatches
    if result is None:
        return rec
    rec.attempts = result.attempts
    rec.exact = result.edges == G.edges
    if instrument and point.algo == "lbl_r":
        rec.coverage_violations = coverage_violations(G, result)
        rec.frontier_violations = frontier_violations(G, result)
    if instrument and point.algo == "nt_r":
        rec.cover_violations = cell_cover_violations(G, result)
        b = ball_params(G.n, D, G.w_max).b
        rec.ball_violations = sum(len(h) > b for h in result.sub_calls[0].neighborhoods)
    return rec


@dataclass
class ExperimentConfig:
    algorithm: str = "lbl_r"
    n_values: list[int] = field(default_factory=lambda: [64, 128, 256])
    d_values: list[int] = field(default_factory=lambda: [4])
    alpha_values: list[float] = field(default_factory=lambda: [2.0])
    structures: list[str] = field(default_factory=lambda: ["connected"])
    k: int = 1
    weight_kind: str = "pareto"
    w_cap: float | None = None
    trials: int = 10
    seed: int = 0
    K: float = K_DEFAULT
    c_q: float = C_Q_DEFAULT
    s_factor: float = 1.0
    output: str | None = None
    workers: int = 1
    instrument: bool = True

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        return cls(**json.loads(text))

    def points(self) -> list[TrialPoint]:
        return [
            TrialPoint(self.algorithm, n, d, a, st, self.k if st != "connected" else 1,
                       self.weight_kind, self.w_cap, self.K, self.c_q, self.s_factor)
            for st in self.structures
            for d in self.d_values
            for a in self.alpha_values
            for n in self.n_values
        ]


def _run_job(job):
    point, seed, idx, instrument = job
    return run_trial(point, seed, trial=idx, instrument=instrument)


def loglog_slope(ns, totals) -> float:
    """Least-squares slope of ``log(total)`` against ``log(n)``."""
    x, y = np.log(np.asarray(ns, float)), np.log(np.asarray(totals, float))
    return float(np.polyfit(x, y, 1)[0])


def summarize(records: list[TrialRecord]) -> dict:
    groups: dict = {}
    for r in records:
        groups.setdefault((r.algo, r.dmax, r.alpha, r.structure), []).append(r)
    out = []
    for (algo, d, a, st), rs in sorted(groups.items()):
        by_n: dict[int, list[TrialRecord]] = {}
        for r in rs:
            by_n.setdefault(r.n, []).append(r)
        ns = sorted(by_n)
        med = [float(np.median([r.total for r in by_n[n]])) for n in ns]
        entry = {
            "algo": algo, "dmax": d, "alpha": a, "structure": st,
            "n": ns,
            "median_total": med,
            "success_rate": [float(np.mean([r.exact for r in by_n[n]])) for n in ns],
            "failures": sum(r.status != "ok" for r in rs),
        }
        if len(ns) >= 2:
            entry["loglog_slope"] = loglog_slope(ns, med)
        out.append(entry)
    return {"trials": len(records), "groups": out}


def write_csv(records: list[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for r in records:
            w.writerow(r.csv_row())


def run_experiment(config: ExperimentConfig) -> tuple[list[TrialRecord], dict]:
    """Run every trial of the sweep; write CSV and a JSON summary if asked."""
    jobs = []
    idx = 0
    for point in config.points():
        for _ in range(config.trials):
            jobs.append((point, trial_seed(config.seed, idx), idx, config.instrument))
            idx += 1
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as ex:
            records = list(ex.map(_run_job, jobs))
    else:
        records = [_run_job(j) for j in jobs]
    records.sort(key=lambda r: r.trial)
    summary = summarize(records)
    if config.output:
        path = Path(config.output)
        write_csv(records, path)
        path.with_suffix(".summary.json").write_text(json.dumps(summary, indent=2))
    return records, summary


# -- distance-query demo ------------------------------------------------------


@dataclass
class QdDemoReport:
    tables: dict
    equal_by_threshold: dict
    qw_probe: tuple[float, float]
    transitive: bool

    @property
    def identical_at_1(self) -> bool:
        return self.equal_by_threshold[1.0]

    @property
    def distinguished(self) -> bool:
        return self.qw_probe[0] != self.qw_probe[1]

    def text(self) -> str:
        lines = ["triangle a=0 b=1 c=2; ab=1 bc=1; second graph adds ac=2"]
        for thr, eq in self.equal_by_threshold.items():
            lines.append(f"q_d tables at W_thr={thr:g}: {'identical' if eq else 'differ'}")
        lines.append(f"q_w(a,c,1): {self.qw_probe[0]:g} vs {self.qw_probe[1]:g}")
        lines.append(f"ac transitive in second graph: {self.transitive}")
        lines.append(f"verdict: q_d alone indistinguishable={self.identical_at_1}, "
                     f"q_w distinguishes={self.distinguished}")
        return "\n".join(lines)


def qd_indistinguishability_demo() -> QdDemoReport:
    """Path a-b-c versus the same path plus a transitive chord ``ac``."""
    without = WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    with_ac = WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)])
    tables: dict = {}
    equal: dict = {}
    for thr in (1.0, 2.0):
        pair = []
        for G in (without, with_ac):
            s = OracleSession(G)
            pair.append(s.batch_query("q_d", range(3), range(3), thr))
        tables[thr] = pair
        equal[thr] = bool(np.array_equal(pair[0], pair[1]))
    probe = (OracleSession(without).q_w(0, 2, 1.0), OracleSession(with_ac).q_w(0, 2, 1.0))
    return QdDemoReport(tables, equal, probe, is_transitive_edge(with_ac, 0, 2))


# -- lemma statistics ---------------------------------------------------------


@dataclass
class LemmaReport:
    kind: str
    params: dict
    samples: np.ndarray
    summary: dict

    def text(self) -> str:
        body = ", ".join(f"{k}={v}" for k, v in self.summary.items())
        return f"{self.kind} {self.params}: {body}"


def _wmax_stats(p: dict, trials: int, rng: np.random.Generator) -> tuple[np.ndarray, dict]:
    m, alpha, d, c = int(p["m"]), float(p["alpha"]), int(p["d"]), float(p.get("c", 2.0))
    wstar = critical_threshold(d, alpha)
    maxima = np.array([pareto_sample(alpha, rng, m).max() for _ in range(trials)])
    return maxima, {
        "w_star": wstar,
        "threshold": c * wstar,
        "p_exceed": float(np.mean(maxima > c * wstar)),
        "min_wmax": float(maxima.min()),
    }


def _largest_stats(p: dict, trials: int, seed: int) -> tuple[np.ndarray, dict]:
    n, d, alpha = int(p["n"]), int(p["d"]), float(p["alpha"])
    dp = float(p.get("dp", 0.5))
    factor = float(p.get("bound_factor", 12.0))
    thr = (d / dp) ** (1.0 / alpha)
    sizes = []
    for t in range(trials):
        spec = InstanceSpec(n, d, "connected", 1, WeightModel("pareto", alpha), trial_seed(seed, t))
        G = gen_graph(spec)
        sizes.append(max(len(c) for c in components(layer(G, thr))))
    sizes = np.array(sizes)
    bound = factor * math.log(n)
    return sizes, {
        "thr": thr,
        "p": thr ** (-alpha),
        "bound": bound,
        "frac_within": float(np.mean(sizes <= bound)),
        "median": float(np.median(sizes)),
        "max": int(sizes.max()),
    }


def _early_stats(p: dict, trials: int, seed: int) -> tuple[np.ndarray, dict]:
    n, d, alpha = int(p["n"]), int(p["d"]), float(p["alpha"])
    run = int(p.get("run", 0))
    pairs = []
    confirmed = 0
    for t in range(trials):
        s = trial_seed(seed, t)
        G = gen_graph(InstanceSpec(n, d, "connected", 1, WeightModel("pareto", alpha), s))
        brk, _ = predicted_break_iteration(G)
        if t < run:
            res = lbl_r(OracleSession(G), rng=algo_rng(s))
            if res.break_iteration != brk or res.edges != G.edges:
                raise AssertionError(f"trial {t}: run disagrees with prediction")
            confirmed += 1
        pairs.append((brk, floor_log2(G.w_max)))
    arr = np.array(pairs)
    return arr, {
        "frac_early": float(np.mean(arr[:, 0] < arr[:, 1])),
        "break_hist": dict(sorted(Counter(arr[:, 0].tolist()).items())),
        "last_hist": dict(sorted(Counter(arr[:, 1].tolist()).items())),
        "confirmed_by_run": confirmed,
    }


def lemma_stats(kind: str, params: dict, trials: int, seed: int = 0) -> LemmaReport:
    """Empirical check of one probabilistic statement.

    ``wmax``: P(W_max > c * w*) over ``m`` Pareto draws. ``largest_component``:
    largest layer component when ``D * p = dp``. ``early_termination``:
    break iteration of the layer sweep versus ``floor(log2 W_max)``; the
    first ``run`` trials are also reconstructed for real and must agree.
    """
    if kind == "wmax":
        samples, summary = _wmax_stats(params, trials, np.random.default_rng(seed))
    elif kind == "largest_component":
        samples, summary = _largest_stats(params, trials, seed)
    elif kind == "early_termination":
        samples, summary = _early_stats(params, trials, seed)
    else:
        raise ValueError(f"unknown lemma {kind!r}")
    return LemmaReport(kind, dict(params), samples, summary)


def distance_table(G: WeightedGraph, thr: float = 1.0) -> np.ndarray:
    """All-pairs distances from the reference engine."""
    return np.stack([shortest_paths(layer(G, thr), s).dist for s in range(G.n)])


def record_from_row(row: dict) -> dict:
    """Typed view of a CSV row, for replay comparisons."""
    out = dict(row)
    for k in ("trial", "n", "m", "dmax", "seed", "qw", "qd", "qc", "total", "attempts"):
        out[k] = int(row[k])
    for k in ("alpha", "wmax", "wstar"):
        out[k] = float(row[k])
    return out


def replay(row: dict, **point_kw) -> TrialRecord:
    """Re-run the trial a CSV row came from."""
    r = record_from_row(row)
    point = TrialPoint(r["algo"], r["n"], r["dmax"], r["alpha"], **point_kw)
    return run_trial(point, r["seed"], trial=r["trial"])

