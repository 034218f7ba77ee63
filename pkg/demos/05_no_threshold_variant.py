"""Connected, light-weight graphs need no thresholds at all."""
import numpy as np

from wgrecon.gen import InstanceSpec, WeightModel, gen_graph
from wgrecon.ntr import ball_params, nt_r
from wgrecon.oracle import OracleSession

G = gen_graph(InstanceSpec(200, 3, weight_model=WeightModel("uniform-truncated", 2.0, 2.0), seed=5))
p = ball_params(G.n, G.max_degree, G.w_max)
print(p)

res = nt_r(OracleSession(G), rng=np.random.default_rng(1), keep_cells=True)
sub = res.sub_calls[0]
print("centres", sub.n_centers, "attempts", sub.attempts)
print("largest ball", max(len(h) for h in sub.neighborhoods), "bound", p.b)
print("exact:", res.edges == G.edges, "queries", res.ledger["cumulative_total"])
