"""Bounded-degree instances with heavy-tailed weights."""
import numpy as np

from wgrecon.gen import InstanceSpec, WeightModel, critical_threshold, gen_graph, instance_stats
from wgrecon.graph import components, layer

spec = InstanceSpec(2000, 8, weight_model=WeightModel("pareto", 2.0), seed=3)
G = gen_graph(spec)
st = instance_stats(G, alpha=2.0, d=spec.d_max)
print(st)

# above the critical threshold the layer shatters into small pieces
w_star = critical_threshold(spec.d_max, 2.0)
for thr in (1, 2, w_star, 2 * w_star, 8):
    sizes = sorted((len(c) for c in components(layer(G, thr))), reverse=True)
    print(f"thr={thr:5.2f} edges={len(layer(G, thr).edges):5d} largest={sizes[:5]}")

# the JSON string is enough to rebuild the instance
again = gen_graph(InstanceSpec.from_json(spec.to_json()))
print(again == G)

w = np.array(list(G.edges.values()))
print("share of weights >= 2:", np.mean(w >= 2), "expected", 2.0**-2)
