"""A small sweep against the all-pairs baseline, then the tail statistics."""
import json

from wgrecon.harness import ExperimentConfig, lemma_stats, run_experiment

ns = [128, 256, 512, 1024]
for algo in ("exhaustive", "lbl_r"):
    _, summary = run_experiment(ExperimentConfig(algo, ns, trials=3, seed=1))
    g = summary["groups"][0]
    print(algo, [int(m) for m in g["median_total"]], "slope %.2f" % g["loglog_slope"])

print(lemma_stats("wmax", {"m": 100000, "alpha": 2, "d": 16, "c": 2}, 200).text())
print(lemma_stats("largest_component", {"n": 3000, "d": 8, "alpha": 2}, 20).text())
rep = lemma_stats("early_termination", {"n": 1024, "d": 8, "alpha": 2, "run": 3}, 20)
print(json.dumps(rep.summary))
