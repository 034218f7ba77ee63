"""Distances alone cannot reveal a chord that is no shorter than the path it spans."""
from wgrecon.harness import qd_indistinguishability_demo

rep = qd_indistinguishability_demo()
print(rep.text())

# the raw tables, threshold by threshold
for thr, (t0, t1) in rep.tables.items():
    print(f"thr={thr:g}")
    print(t0)
    print(t1)
