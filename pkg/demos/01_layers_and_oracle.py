"""Layers of a small weighted graph, and what each query type can see."""
import numpy as np

from wgrecon.graph import WeightedGraph, components, layer
from wgrecon.oracle import OracleSession

# a 6-vertex graph: a light path 0-1-2-3 and a heavy pair 4-5
G = WeightedGraph(6, [(0, 1, 1.0), (1, 2, 2.5), (2, 3, 7.0), (0, 3, 3.0), (4, 5, 9.0)])
print(G.n, G.m, G.max_degree, G.w_max)

# each threshold keeps only heavier edges; components split as it grows
for thr in (1, 2, 4, 8):
    print(f"thr={thr}", sorted(layer(G, thr).edges), components(layer(G, thr)))

s = OracleSession(G)
s.q_w(0, 3, 1)           # 3.0, the stored weight
s.q_d(0, 3, 1)           # 3.0 as well; the path 0-1-2-3 is longer
s.q_d(0, 3, 4)           # inf: only 2-3 and 4-5 survive
s.q_c(2, [3], 4)         # 1

# batches charge one query per pair
D = s.batch_query("q_d", range(6), range(6), 1)
print(np.round(D, 2))
print(dict(s.ledger.counts), s.ledger.cumulative_total)
