"""Random instances: bounded-degree structure with i.i.d. edge weights."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from wgrecon.errors import Infeasible
from wgrecon.graph import WeightedGraph

# target edge count is min(C_M * n, n * D / 2); keeps m / D growing with n
C_M = 1.5
WEIGHT_KINDS = ("pareto", "uniform-truncated", "fixed")


def pareto_ppf(q, alpha: float):
    """Inverse of ``F(w) = 1 - w**-alpha``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return (1.0 - np.asarray(q, dtype=np.float64)) ** (-1.0 / alpha)


def pareto_cdf(w, alpha: float):
    w = np.asarray(w, dtype=np.float64)
    return np.where(w >= 1.0, 1.0 - w ** (-alpha), 0.0)


def pareto_from_uniform(u, alpha: float):
    """``u ** (-1/alpha)`` for ``u`` in ``(0, 1]``; ``u -> 1`` maps to ``w -> 1``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return np.asarray(u, dtype=np.float64) ** (-1.0 / alpha)


def pareto_sample(alpha: float, rng: np.random.Generator, size=None):
    """Pareto(alpha) draws with support ``[1, inf)``."""
    # 1 - random() lies in (0, 1], so samples are >= 1 exactly
    u = 1.0 - rng.random(size)
    w = pareto_from_uniform(u, alpha)
    return float(w) if size is None else w


@dataclass(frozen=True)
class WeightModel:
    kind: str = "pareto"
    alpha: float = 2.0
    w_cap: float | None = None

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight model {self.kind!r}")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.w_cap is not None and not self.w_cap >= 1:
            raise ValueError("w_cap must be >= 1")
        if self.kind == "uniform-truncated" and self.w_cap is None:
            raise ValueError("uniform-truncated weights need w_cap")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "fixed":
            return np.full(size, 1.0 if self.w_cap is None else float(self.w_cap))
        if self.kind == "uniform-truncated":
            return 1.0 + (self.w_cap - 1.0) * rng.random(size)
        if self.w_cap is None:
            return pareto_sample(self.alpha, rng, size)
        # truncated Pareto on [1, w_cap] by inverse CDF
        top = 1.0 - self.w_cap ** (-self.alpha)
        w = pareto_ppf(top * rng.random(size), self.alpha)
        return np.clip(w, 1.0, self.w_cap)


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    d_max: int
    structure: str = "connected"
    k: int = 1
    weight_model: WeightModel = WeightModel()
    seed: int = 0

    def __post_init__(self):
        if self.structure not in ("connected", "multi-component"):
            raise ValueError(f"unknown structure {self.structure!r}")

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "d_max": self.d_max,
                "structure": self.structure,
                "k": self.k,
                "weight_model": self.weight_model.kind,
                "alpha": self.weight_model.alpha,
                "w_cap": self.weight_model.w_cap,
                "seed": self.seed,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> InstanceSpec:
        d = json.loads(text)
        wm = WeightModel(d["weight_model"], float(d["alpha"]), d["w_cap"])
        return cls(int(d["n"]), int(d["d_max"]), d["structure"], int(d["k"]), wm, int(d["seed"]))


def _connected_block(
    verts: np.ndarray, d_max: int, rng: np.random.Generator, c_m: float
) -> list[tuple[int, int]]:
    nb = len(verts)
    if nb <= 1:
        return []
    if nb == 2:
        if d_max < 1:
            raise Infeasible("two connected vertices need d_max >= 1")
        return [(int(verts[0]), int(verts[1]))]
    if d_max < 2:
        raise Infeasible(f"a connected block of {nb} vertices needs d_max >= 2")

    deg = np.zeros(nb, dtype=np.int64)
    edges: set[tuple[int, int]] = set()
    order = rng.permutation(nb)
    open_ = [int(order[0])]
    for v in order[1:]:
        v = int(v)
        i = int(rng.integers(len(open_)))
        p = open_[i]
        edges.add((min(p, v), max(p, v)))
        deg[p] += 1
        deg[v] += 1
        if deg[p] >= d_max:
            open_[i] = open_[-1]
            open_.pop()
        open_.append(v)

    target = min(round(c_m * nb), nb * d_max // 2, nb * (nb - 1) // 2)
    tries = 20 * max(target, 1)
    while len(edges) < target and tries > 0:
        tries -= 1
        a, b = (int(x) for x in rng.integers(nb, size=2))
        if a == b or deg[a] >= d_max or deg[b] >= d_max:
            continue
        e = (min(a, b), max(a, b))
        if e in edges:
            continue
        edges.add(e)
        deg[a] += 1
        deg[b] += 1
    return [(int(verts[a]), int(verts[b])) for a, b in sorted(edges)]


def gen_graph(
    spec: InstanceSpec, rng: np.random.Generator | None = None, *, c_m: float = C_M
) -> WeightedGraph:
    """Draw a graph with max degree ``<= spec.d_max`` and i.i.d. weights.

    The connected variant grows a random spanning tree under the degree cap
    and then adds random edges (rejecting cap violations) towards
    ``min(c_m * n, n * d_max / 2)`` edges. The multi-component variant splits
    the vertices into ``k`` blocks with symmetric-Dirichlet sizes and builds
    one connected block on each.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    n = spec.n
    if n < 1:
        raise Infeasible("need at least one vertex")
    if spec.structure == "connected":
        blocks = [np.arange(n)]
    else:
        k = spec.k
        if not 1 <= k <= n:
            raise Infeasible(f"cannot split {n} vertices into {k} components")
        extra = rng.multinomial(n - k, rng.dirichlet(np.ones(k))) if k > 1 else np.array([n - 1])
        sizes = 1 + extra
        perm = rng.permutation(n)
        cuts = np.cumsum(sizes)[:-1]
        blocks = [np.sort(b) for b in np.split(perm, cuts)]

    pairs: list[tuple[int, int]] = []
    for verts in blocks:
        pairs += _connected_block(verts, spec.d_max, rng, c_m)
    pairs.sort()
    ws = spec.weight_model.sample(rng, len(pairs))
    return WeightedGraph(n, ((u, v, float(w)) for (u, v), w in zip(pairs, ws)))


@dataclass(frozen=True)
class InstanceStats:
    n: int
    m: int
    max_degree: int
    w_max: float
    w_star: float | None

    def as_dict(self) -> dict:
        return asdict(self)


def critical_threshold(d: float, alpha: float) -> float:
    """Threshold where expected layer degree ``d * thr**-alpha`` equals 1."""
    return d ** (1.0 / alpha)


def instance_stats(G: WeightedGraph, alpha: float | None = None, d: int | None = None) -> InstanceStats:
    """Size, degree and weight summary; ``w_star`` needs ``alpha``.

    ``d`` overrides the degree used for ``w_star`` (e.g. ``InstanceSpec.d_max``).
    """
    D = G.max_degree
    dd = D if d is None else d
    w_star = critical_threshold(dd, alpha) if alpha is not None and dd > 0 else None
    return InstanceStats(G.n, G.m, D, G.w_max, w_star)


def floor_log2(x: float) -> int:
    """Exact ``floor(log2(x))`` for ``x >= 1``."""
    if x < 1:
        raise ValueError("x must be >= 1")
    return math.frexp(x)[1] - 1
