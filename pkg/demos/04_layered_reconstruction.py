"""Recovering a hidden graph through the oracle, layer by layer."""
import numpy as np

from wgrecon.gen import InstanceSpec, WeightModel, gen_graph
from wgrecon.oracle import OracleSession
from wgrecon.recon import lbl_r

G = gen_graph(InstanceSpec(1024, 4, "multi-component", 3, WeightModel("pareto", 2.0), seed=11))
session = OracleSession(G)
res = lbl_r(session, rng=np.random.default_rng(0))

for it in res.iterations:
    print(f"j={it.j} thr={it.thr:g} components={len(it.component_sizes)} "
          f"largest={it.largest} new_edges={len(it.edges)} paths={set(it.paths)}")

print("stopped early:", res.broke, "at", res.break_iteration)
print("exact:", res.edges == G.edges)
print(res.ledger)
print("all pairs would cost", G.n * (G.n - 1) // 2)
