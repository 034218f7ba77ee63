"""Ground-truth weighted graphs, threshold layers and exact truth engines.

Vertices are dense integer ids ``0..n-1``. Edge weights are floats ``>= 1``
stored verbatim. The engines here are plain-Python reference
implementations (heap Dijkstra, BFS); the oracle uses faster vectorised
routes and can shadow-check itself against these.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np
from scipy import sparse

from wgrecon.errors import InvalidThreshold, InvalidVertex, NotAnEdge

INF = math.inf


def _key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class WeightedGraph:
    """Immutable undirected graph with real edge weights ``>= 1``.

    Args:
        n: Number of vertices.
        edges: Iterable of ``(u, v, w)`` triples. Each unordered pair may
            appear once.

    Raises:
        ValueError: on self-loops, parallel edges or weights below 1.
        InvalidVertex: on ids outside ``0..n-1``.
    """

    __slots__ = ("n", "_weights", "_adj", "_arrays", "_csr")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = int(n)
        weights: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            for x in (u, v):
                if not 0 <= x < n:
                    raise InvalidVertex(x)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not w >= 1.0:
                raise ValueError(f"edge ({u}, {v}) has weight {w!r} < 1")
            k = _key(u, v)
            if k in weights:
                raise ValueError(f"parallel edge {k}")
            weights[k] = w
        self._weights = dict(sorted(weights.items()))
        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for (u, v), w in self._weights.items():
            adj[u].append((v, w))
            adj[v].append((u, w))
        self._adj = adj
        self._arrays = None
        self._csr = None

    # -- basic accessors ---------------------------------------------------

    @property
    def m(self) -> int:
        return len(self._weights)

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    @property
    def w_max(self) -> float:
        """Largest edge weight; 1.0 for an edgeless graph."""
        return max(self._weights.values(), default=1.0)

    @property
    def edges(self) -> dict[tuple[int, int], float]:
        """Copy of the edge map ``{(u, v): w}`` with ``u < v``, sorted."""
        return dict(self._weights)

    def weight(self, u: int, v: int) -> float:
        """Edge weight, or 0.0 when ``uv`` is not an edge."""
        return self._weights.get(_key(u, v), 0.0)

    def has_edge(self, u: int, v: int) -> bool:
        return _key(u, v) in self._weights

    def neighbors(self, u: int) -> list[tuple[int, float]]:
        self._check_vertex(u)
        return list(self._adj[u])

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def _check_vertex(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise InvalidVertex(u)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(us, vs, ws)`` arrays sorted by ``(u, v)``, ``u < v``."""
        if self._arrays is None:
            m = self.m
            us = np.fromiter((k[0] for k in self._weights), dtype=np.int64, count=m)
            vs = np.fromiter((k[1] for k in self._weights), dtype=np.int64, count=m)
            ws = np.fromiter(self._weights.values(), dtype=np.float64, count=m)
            for a in (us, vs, ws):
                a.setflags(write=False)
            self._arrays = (us, vs, ws)
        return self._arrays

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.n == other.n and self._weights == other._weights

    def __hash__(self) -> int:
        return hash((self.n, tuple(self._weights.items())))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m})"

    # -- text format -------------------------------------------------------

    def dump(self, fh: TextIO) -> None:
        """Write ``n m`` then one ``u v w`` line per edge."""
        fh.write(f"{self.n} {self.m}\n")
        for (u, v), w in self._weights.items():
            fh.write(f"{u} {v} {w!r}\n")

    def dumps(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines += [f"{u} {v} {w!r}" for (u, v), w in self._weights.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> WeightedGraph:
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows:
            raise ValueError("empty graph file")
        n, m = int(rows[0][0]), int(rows[0][1])
        body = rows[1:]
        if len(body) != m:
            raise ValueError(f"header announces {m} edges, found {len(body)}")
        return cls(n, ((int(u), int(v), float(w)) for u, v, w in body))

    @classmethod
    def load(cls, fh: TextIO) -> WeightedGraph:
        return cls.loads(fh.read())


@dataclass(frozen=True)
class LayerView:
    """All vertices of ``base`` with only the edges of weight ``>= thr``."""

    base: WeightedGraph
    thr: float

    def __post_init__(self) -> None:
        if not self.thr >= 1.0:
            raise InvalidThreshold(self.thr)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def edges(self) -> dict[tuple[int, int], float]:
        return {k: w for k, w in self.base._weights.items() if w >= self.thr}

    def neighbors(self, u: int) -> list[tuple[int, float]]:
        return [(v, w) for v, w in self.base.neighbors(u) if w >= self.thr]

    def weight(self, u: int, v: int) -> float:
        w = self.base.weight(u, v)
        return w if w >= self.thr else 0.0

    def csr(self) -> sparse.csr_matrix:
        """Symmetric sparse adjacency of the layer (for scipy engines)."""
        us, vs, ws = self.base.edge_arrays()
        keep = ws >= self.thr
        us, vs, ws = us[keep], vs[keep], ws[keep]
        n = self.n
        return sparse.csr_matrix(
            (np.concatenate([ws, ws]), (np.concatenate([us, vs]), np.concatenate([vs, us]))),
            shape=(n, n),
        )


@dataclass
class DistanceMap:
    """Single-source distances: weighted ``dist`` and unweighted ``hops``.

    Unreachable vertices carry ``inf`` in both arrays.
    """

    source: int
    dist: np.ndarray
    hops: np.ndarray = field(repr=False)

    def __getitem__(self, v: int) -> float:
        return float(self.dist[v])


def layer(G: WeightedGraph, thr: float) -> LayerView:
    return LayerView(G, float(thr))


def _as_view(g: WeightedGraph | LayerView) -> LayerView:
    return g if isinstance(g, LayerView) else LayerView(g, 1.0)


def shortest_paths(view: WeightedGraph | LayerView, source: int) -> DistanceMap:
    """Heap Dijkstra plus BFS hop counts inside ``view``."""
    view = _as_view(view)
    G = view.base
    G._check_vertex(source)
    thr = view.thr
    n = G.n
    dist = [INF] * n
    dist[source] = 0.0
    done = [False] * n
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in G._adj[u]:
            if w < thr:
                continue
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))

    hops = [INF] * n
    hops[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v, w in G._adj[u]:
            if w >= thr and hops[v] == INF:
                hops[v] = hops[u] + 1
                queue.append(v)
    return DistanceMap(source, np.array(dist, dtype=np.float64), np.array(hops, dtype=np.float64))


def components(view: WeightedGraph | LayerView) -> list[list[int]]:
    """Connected components of ``view``, each sorted, ordered by smallest id."""
    view = _as_view(view)
    G = view.base
    thr = view.thr
    seen = [False] * G.n
    out = []
    for s in range(G.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        stack = [s]
        while stack:
            u = stack.pop()
            for v, w in G._adj[u]:
                if w >= thr and not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        comp.sort()
        out.append(comp)
    return out


def component_labels(view: WeightedGraph | LayerView) -> np.ndarray:
    labels = np.empty(_as_view(view).n, dtype=np.int64)
    for i, comp in enumerate(components(view)):
        labels[comp] = i
    return labels


def is_transitive_edge(G: WeightedGraph, u: int, v: int) -> bool:
    """True iff some u-v path avoiding the edge ``uv`` is no longer than it."""
    w_uv = G.weight(u, v)
    if w_uv == 0.0:
        raise NotAnEdge(u, v)
    dist = [INF] * G.n
    dist[u] = 0.0
    heap = [(0.0, u)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        if x == v:
            break
        for y, w in G._adj[x]:
            if {x, y} == {u, v}:
                continue
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist[v] <= w_uv
