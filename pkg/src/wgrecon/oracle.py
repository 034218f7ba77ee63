"""Query oracle over a hidden weighted graph.

An :class:`OracleSession` is the only channel reconstruction code may use.
It answers three query kinds, each inside the layer ``G[w >= thr]``:

* ``q_w(u, v, thr)``: edge weight, 0 if no edge;
* ``q_d(u, v, thr)``: shortest weighted distance, ``inf`` if disconnected;
* ``q_c(u, S, thr)``: 1 if ``u`` shares a component with some member of ``S``.

Every issued pair evaluation is charged to a :class:`QueryLedger`. Batch
entry points exist purely so that large Cartesian-product queries are
answered with numpy instead of a Python loop; they charge exactly what the
equivalent sequence of single queries would.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy.sparse import csgraph

from wgrecon.errors import BudgetExhausted, InvalidPair, InvalidSet, InvalidThreshold, InvalidVertex
from wgrecon.graph import LayerView, WeightedGraph, component_labels, shortest_paths

KINDS = ("q_w", "q_d", "q_c")


@dataclass
class QueryLedger:
    counts: Counter = field(default_factory=Counter)
    attempt_total: int = 0
    cumulative_total: int = 0
    attempt_index: int = 0
    attempt_history: list[int] = field(default_factory=list)

    def charge(self, kind: str, k: int) -> None:
        self.counts[kind] += k
        self.attempt_total += k
        self.cumulative_total += k

    def reset_attempt(self) -> None:
        self.attempt_history.append(self.attempt_total)
        self.attempt_total = 0
        self.attempt_index += 1

    def snapshot(self) -> dict:
        return {
            "q_w": self.counts["q_w"],
            "q_d": self.counts["q_d"],
            "q_c": self.counts["q_c"],
            "attempt_total": self.attempt_total,
            "cumulative_total": self.cumulative_total,
            "attempt_index": self.attempt_index,
        }


class OracleSession:
    """Single-caller query session over a hidden graph.

    Args:
        hidden: The ground-truth graph. Algorithms must not touch it.
        shadow: Re-derive every answer with the reference engines in
            :mod:`wgrecon.graph` and count mismatches.
        cache: Charge identical repeated queries only once. Off by default;
            meant for comparison experiments.
        trace: Optional text stream receiving one ``type u v thr result``
            line per evaluated query (``q_c`` logs ``|S|`` in place of ``v``).
    """

    def __init__(
        self,
        hidden: WeightedGraph,
        *,
        shadow: bool = False,
        cache: bool = False,
        trace: TextIO | None = None,
    ):
        self._g = hidden
        self.n = hidden.n
        self.announced_wmax = hidden.w_max
        self.max_degree = hidden.max_degree
        self.ledger = QueryLedger()
        self.budget: int | None = None
        self.shadow = shadow
        self.shadow_checks = 0
        self.shadow_mismatches = 0
        self.cache = cache
        self._seen: set = set()
        self.trace = trace

        us, vs, ws = hidden.edge_arrays()
        self._edge_keys = us * max(self.n, 1) + vs
        self._edge_w = ws
        self._thr = None
        self._csr = None
        self._rows: dict[int, np.ndarray] = {}
        self._labels: np.ndarray | None = None
        self._shadow_rows: dict[tuple[float, int], np.ndarray] = {}
        self._shadow_labels: dict[float, np.ndarray] = {}

    # -- budget ----------------------------------------------------------------

    def begin_attempt(self, budget: int | None) -> None:
        """Start a fresh attempt: zero the attempt counter and set ``budget``."""
        self.ledger.reset_attempt()
        self.budget = None if budget is None else int(budget)

    def end_attempt(self) -> None:
        self.budget = None

    def _charge(self, kind: str, k: int) -> None:
        if self.budget is not None and self.ledger.attempt_total + k > self.budget:
            raise BudgetExhausted(self.budget, self.ledger.attempt_total, k)
        self.ledger.charge(kind, k)

    # -- validation ------------------------------------------------------------

    def _vertices(self, xs) -> np.ndarray:
        arr = np.asarray(xs, dtype=np.int64).ravel()
        if arr.size and (arr.min() < 0 or arr.max() >= self.n):
            bad = arr[(arr < 0) | (arr >= self.n)][0]
            raise InvalidVertex(int(bad))
        return arr

    @staticmethod
    def _threshold(thr: float) -> float:
        thr = float(thr)
        if not thr >= 1.0:
            raise InvalidThreshold(thr)
        return thr

    # -- truth routes ----------------------------------------------------------

    def _use_layer(self, thr: float) -> None:
        if thr != self._thr:
            self._thr = thr
            self._csr = LayerView(self._g, thr).csr()
            self._rows = {}
            self._labels = None

    def _dist_rows(self, sources: np.ndarray) -> np.ndarray:
        missing = [int(s) for s in np.unique(sources) if int(s) not in self._rows]
        if missing:
            block = csgraph.dijkstra(self._csr, directed=False, indices=missing)
            for s, row in zip(missing, block):
                row.setflags(write=False)
                self._rows[s] = row
        if len(sources) == 0:
            return np.empty((0, self.n))
        return np.stack([self._rows[int(s)] for s in sources])

    def _weights(self, us: np.ndarray, vs: np.ndarray, thr: float) -> np.ndarray:
        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        keys = lo * max(self.n, 1) + hi
        idx = np.searchsorted(self._edge_keys, keys)
        idx = np.minimum(idx, max(len(self._edge_keys) - 1, 0))
        out = np.zeros(len(keys), dtype=np.float64)
        if len(self._edge_keys):
            hit = self._edge_keys[idx] == keys
            w = self._edge_w[idx]
            ok = hit & (w >= thr)
            out[ok] = w[ok]
        return out

    def _component_labels(self) -> np.ndarray:
        if self._labels is None:
            _, self._labels = csgraph.connected_components(self._csr, directed=False)
        return self._labels

    # -- shadow checks ---------------------------------------------------------

    def _shadow_row(self, thr: float, s: int) -> np.ndarray:
        key = (thr, s)
        row = self._shadow_rows.get(key)
        if row is None:
            row = shortest_paths(LayerView(self._g, thr), s).dist
            self._shadow_rows[key] = row
        return row

    def _shadow_record(self, ok: np.ndarray | bool) -> None:
        ok = np.asarray(ok)
        self.shadow_checks += int(ok.size)
        self.shadow_mismatches += int(ok.size - np.count_nonzero(ok))

    def _shadow_w(self, us, vs, thr, got) -> None:
        view = LayerView(self._g, thr)
        want = np.array([view.weight(int(u), int(v)) for u, v in zip(us, vs)])
        self._shadow_record(want == got)

    def _shadow_d(self, us, vs, thr, got) -> None:
        uniq, inv = np.unique(us, return_inverse=True)
        rows = np.stack([self._shadow_row(thr, int(s)) for s in uniq]) if len(us) else None
        want = rows[inv, vs] if len(us) else np.empty(0)
        self._shadow_record(want == got)

    def _shadow_c(self, u, S, thr, got) -> None:
        labels = self._shadow_labels.get(thr)
        if labels is None:
            labels = component_labels(LayerView(self._g, thr))
            self._shadow_labels[thr] = labels
        want = int(any(labels[int(v)] == labels[u] for v in S))
        self._shadow_record(want == got)

    # -- cache -----------------------------------------------------------------

    def _uncached(self, kind: str, us: np.ndarray, vs: np.ndarray, thr: float) -> int:
        fresh = 0
        for u, v in zip(us.tolist(), vs.tolist()):
            key = (kind, thr, min(u, v), max(u, v))
            if key not in self._seen:
                self._seen.add(key)
                fresh += 1
        return fresh

    def _log(self, kind: str, us, vs, thr: float, res) -> None:
        if self.trace is None:
            return
        for u, v, r in zip(np.atleast_1d(us), np.atleast_1d(vs), np.atleast_1d(res)):
            r = float(r)
            self.trace.write(f"{kind} {int(u)} {int(v)} {thr!r} {int(r) if kind == 'q_c' else repr(r)}\n")

    # -- pair queries ----------------------------------------------------------

    def q_w_pairs(self, us, vs, thr: float) -> np.ndarray:
        """Edge-weight queries for aligned pair arrays; one charge per pair."""
        thr = self._threshold(thr)
        us, vs = self._vertices(us), self._vertices(vs)
        if us.shape != vs.shape:
            raise ValueError("pair arrays differ in length")
        if np.any(us == vs):
            raise InvalidPair("q_w needs two distinct vertices")
        cost = self._uncached("q_w", us, vs, thr) if self.cache else len(us)
        self._charge("q_w", cost)
        res = self._weights(us, vs, thr)
        if self.shadow:
            self._shadow_w(us, vs, thr, res)
        self._log("q_w", us, vs, thr, res)
        return res

    def q_d_pairs(self, us, vs, thr: float) -> np.ndarray:
        """Distance queries for aligned pair arrays; one charge per pair."""
        thr = self._threshold(thr)
        us, vs = self._vertices(us), self._vertices(vs)
        if us.shape != vs.shape:
            raise ValueError("pair arrays differ in length")
        cost = self._uncached("q_d", us, vs, thr) if self.cache else len(us)
        self._charge("q_d", cost)
        self._use_layer(thr)
        uniq, inv = np.unique(us, return_inverse=True)
        res = self._dist_rows(uniq)[inv, vs] if len(us) else np.empty(0)
        if self.shadow:
            self._shadow_d(us, vs, thr, res)
        self._log("q_d", us, vs, thr, res)
        return res

    def q_d_rows(self, sources, targets, thr: float) -> np.ndarray:
        """``|sources| x |targets|`` distance table, charged per pair."""
        thr = self._threshold(thr)
        a, b = self._vertices(sources), self._vertices(targets)
        if self.cache:
            uu, vv = np.repeat(a, len(b)), np.tile(b, len(a))
            cost = self._uncached("q_d", uu, vv, thr)
        else:
            cost = len(a) * len(b)
        self._charge("q_d", cost)
        self._use_layer(thr)
        res = self._dist_rows(a)[:, b] if len(a) else np.empty((0, len(b)))
        if self.shadow or self.trace is not None:
            uu, vv = np.repeat(a, len(b)), np.tile(b, len(a))
            if self.shadow:
                self._shadow_d(uu, vv, thr, res.ravel())
            self._log("q_d", uu, vv, thr, res.ravel())
        return res

    def batch_query(self, kind: str, A: Sequence[int], B: Sequence[int], thr: float) -> np.ndarray:
        """Evaluate ``kind`` on every pair of ``A x B``.

        For ``q_w`` identical pairs are skipped (entry 0, not charged).
        Returns an ``|A| x |B|`` array.
        """
        a, b = self._vertices(A), self._vertices(B)
        if kind == "q_d":
            return self.q_d_rows(a, b, thr)
        if kind != "q_w":
            raise ValueError(f"batch_query supports q_w and q_d, not {kind!r}")
        uu, vv = np.repeat(a, len(b)), np.tile(b, len(a))
        keep = uu != vv
        out = np.zeros(len(uu))
        out[keep] = self.q_w_pairs(uu[keep], vv[keep], thr)
        return out.reshape(len(a), len(b))

    # -- single queries --------------------------------------------------------

    def q_w(self, u: int, v: int, thr: float) -> float:
        return float(self.q_w_pairs([u], [v], thr)[0])

    def q_d(self, u: int, v: int, thr: float) -> float:
        return float(self.q_d_pairs([u], [v], thr)[0])

    def q_c(self, u: int, S: Iterable[int], thr: float) -> int:
        """Component query; unit cost regardless of ``|S|``."""
        thr = self._threshold(thr)
        u = int(self._vertices([u])[0])
        S = self._vertices(np.fromiter(S, dtype=np.int64) if not isinstance(S, np.ndarray) else S)
        if np.any(S == u):
            raise InvalidSet(f"vertex {u} is a member of the query set")
        self._charge("q_c", 1)
        self._use_layer(thr)
        if len(S) == 0:
            res = 0
        else:
            labels = self._component_labels()
            res = int(np.any(labels[S] == labels[u]))
        if self.shadow:
            self._shadow_c(u, S, thr, res)
        if self.trace is not None:
            self.trace.write(f"q_c {u} {len(S)} {thr!r} {res}\n")
        return res


def replay_counts(lines: Iterable[str]) -> Counter:
    """Per-type counts from a query-trace log."""
    c: Counter = Counter()
    for ln in lines:
        if ln.strip():
            c[ln.split(None, 1)[0]] += 1
    return c

