"""Command line: ``python -m wgrecon {gen,run,bench,demo-qd,lemma}``."""

from __future__ import annotations

import argparse
import json
import sys

from wgrecon.gen import InstanceSpec, WeightModel, gen_graph
from wgrecon.graph import WeightedGraph
from wgrecon.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    TrialPoint,
    lemma_stats,
    qd_indistinguishability_demo,
    run_experiment,
    run_trial,
)


def _spec_from_args(a) -> InstanceSpec:
    wm = WeightModel(a.weights, a.alpha, a.w_cap)
    return InstanceSpec(a.n, a.dmax, a.structure, a.k, wm, a.seed)


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--dmax", type=int, default=4)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--structure", choices=["connected", "multi-component"], default="connected")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--weights", choices=["pareto", "uniform-truncated", "fixed"], default="pareto")
    p.add_argument("--w-cap", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)


def cmd_gen(a) -> int:
    spec = _spec_from_args(a)
    G = gen_graph(spec)
    out = open(a.out, "w") if a.out else sys.stdout
    try:
        G.dump(out)
    finally:
        if a.out:
            out.close()
    if a.spec_out:
        with open(a.spec_out, "w") as fh:
            fh.write(spec.to_json() + "\n")
    return 0


def cmd_run(a) -> int:
    graph = None
    if a.graph_file:
        with open(a.graph_file) as fh:
            graph = WeightedGraph.load(fh)
    point = TrialPoint(a.algo, a.n, a.dmax, a.alpha, a.structure, a.k, a.weights, a.w_cap,
                       a.K, a.c_q)
    rec = run_trial(point, a.seed, graph=graph, shadow=a.shadow)
    row = rec.csv_row()
    print(",".join(CSV_COLUMNS))
    print(",".join(str(row[c]) for c in CSV_COLUMNS))
    return 0 if rec.exact else 1


def cmd_bench(a) -> int:
    with open(a.config) as fh:
        cfg = ExperimentConfig.from_json(fh.read())
    if a.out:
        cfg.output = a.out
    records, summary = run_experiment(cfg)
    print(json.dumps(summary, indent=2))
    return 0 if all(r.exact for r in records) else 1


def cmd_demo(a) -> int:
    rep = qd_indistinguishability_demo()
    print(rep.text())
    return 0 if rep.identical_at_1 and rep.distinguished else 1


def cmd_lemma(a) -> int:
    params = json.loads(a.params)
    rep = lemma_stats(a.kind, params, a.trials, a.seed)
    print(rep.text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wgrecon", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="emit a random instance in the graph text format")
    _add_instance_args(g)
    g.add_argument("--out", help="graph file (default stdout)")
    g.add_argument("--spec-out", help="also write the instance spec as JSON")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="single trial, one CSV row")
    _add_instance_args(r)
    r.add_argument("--algo", choices=["lbl_r", "nt_r", "exhaustive"], default="lbl_r")
    r.add_argument("--graph-file", help="use this instance instead of generating one")
    r.add_argument("--K", type=float, default=1.0)
    r.add_argument("--c-q", type=float, default=50.0)
    r.add_argument("--shadow", action="store_true", help="cross-check every oracle answer")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="sweep from a JSON config")
    b.add_argument("config")
    b.add_argument("--out", help="CSV path (overrides config)")
    b.set_defaults(func=cmd_bench)

    d = sub.add_parser("demo-qd", help="distance queries cannot see transitive edges")
    d.set_defaults(func=cmd_demo)

    lm = sub.add_parser("lemma", help="statistics for the probabilistic statements")
    lm.add_argument("kind", choices=["wmax", "largest_component", "early_termination"])
    lm.add_argument("--params", default="{}", help='JSON, e.g. \'{"m": 100000, "alpha": 2, "d": 16}\'')
    lm.add_argument("--trials", type=int, default=100)
    lm.add_argument("--seed", type=int, default=0)
    lm.set_defaults(func=cmd_lemma)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
