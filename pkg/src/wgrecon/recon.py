"""Layer-by-layer reconstruction through an :class:`~wgrecon.oracle.OracleSession`.

Everything here sees the hidden graph only through oracle queries. Vertex
sets are passed around as sorted ``int64`` arrays of global ids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from wgrecon.errors import BudgetExhausted, GaveUp
from wgrecon.gen import floor_log2
from wgrecon.oracle import OracleSession

Edges = dict[tuple[int, int], float]

K_DEFAULT = 1.0
C_Q_DEFAULT = 50.0
MAX_ATTEMPTS = 25
# pairs evaluated per q_d call while estimating cell sizes
_ESTIMATE_CHUNK = 1 << 21


def _vset(V) -> np.ndarray:
    return np.unique(np.asarray(V, dtype=np.int64))


def loglog(n: int) -> float:
    """``max(1, ln ln n)``; the clamp keeps small instances well defined."""
    if n < 3:
        return 1.0
    return max(1.0, math.log(math.log(n)))


def quarter_root_ceil(n: int) -> int:
    """Smallest integer ``r`` with ``r**4 >= n``."""
    r = max(0, int(round(n ** 0.25)))
    while r ** 4 < n:
        r += 1
    while r > 0 and (r - 1) ** 4 >= n:
        r -= 1
    return r


def sample(W, s: float, rng: np.random.Generator) -> np.ndarray:
    """Keep each element of ``W`` independently with probability ``s / |W|``.

    Returns ``W`` itself when ``|W| <= s``.
    """
    W = np.asarray(W)
    if len(W) <= s:
        return W
    return W[rng.random(len(W)) < s / len(W)]


def exhaustive_query(session: OracleSession, c, thr: float) -> Edges:
    """``q_w`` on every unordered pair of ``c``; nonzero answers are edges."""
    c = _vset(c)
    if len(c) < 2:
        return {}
    i, j = np.triu_indices(len(c), k=1)
    us, vs = c[i], c[j]
    w = session.q_w_pairs(us, vs, thr)
    hit = np.flatnonzero(w)
    return {(int(us[h]), int(vs[h])): float(w[h]) for h in hit}


def find_connected_components(session: OracleSession, V, thr: float) -> list[np.ndarray]:
    """Components of the layer restricted to ``V`` using only ``q_c``.

    Each vertex is first tested against everything seen so far; on a hit the
    owning component is located by halving the component list, testing the
    first half with one query per level.
    """
    V = _vset(V)
    if len(V) == 0:
        raise ValueError("V must be nonempty")
    owner = np.empty(len(V), dtype=np.int64)
    owner[0] = 0
    k = 1
    for i in range(1, len(V)):
        seen = V[:i]
        if session.q_c(int(V[i]), seen, thr) == 0:
            owner[i] = k
            k += 1
            continue
        lo, hi = 0, k
        while hi - lo > 1:
            mid = (lo + hi) // 2
            tags = owner[:i]
            half = seen[(tags >= lo) & (tags < mid)]
            if session.q_c(int(V[i]), half, thr):
                hi = mid
            else:
                lo = mid
        owner[i] = lo
    return [V[owner == j] for j in range(k)]


def find_neighbors(session: OracleSession, V, a: int, thr: float) -> np.ndarray:
    """Vertices within two hops of ``a`` in the layer, ``a`` included."""
    V = _vset(V)

    def scan(x: int) -> np.ndarray:
        others = V[V != x]
        w = session.q_w_pairs(np.full(len(others), x), others, thr)
        return others[w != 0]

    first = scan(a)
    found = [np.array([a]), first]
    for v in first:
        found.append(scan(int(v)))
    return np.unique(np.concatenate(found))


@dataclass
class CentersState:
    """Outcome of centre selection on one vertex set.

    ``rows[i]`` holds the queried distances from ``centers[i]`` to every
    vertex of ``vertices``; ``dist_to_centers`` is their column minimum.
    """

    vertices: np.ndarray
    centers: np.ndarray
    rows: np.ndarray
    dist_to_centers: np.ndarray
    s: float
    T: int
    K: float
    passes: int = 0
    removal_estimates: list[np.ndarray] = field(default_factory=list)


def estimated_centers(
    session: OracleSession,
    V,
    s: float,
    thr: float,
    rng: np.random.Generator,
    *,
    K: float = K_DEFAULT,
) -> CentersState:
    """Grow a centre set until no candidate's estimated cell reaches ``5n/s``.

    Each pass samples new centres from the candidates, queries their
    distances to all of ``V``, then estimates every remaining candidate's
    Voronoi cell size from ``T`` uniform draws of ``V`` (with replacement).
    """
    V = _vset(V)
    n = len(V)
    T = max(1, math.ceil(K * s * math.log(n) * loglog(n))) if n > 1 else 1
    cutoff = 5 * n / s if s > 0 else math.inf
    centers: list[np.ndarray] = []
    rows: list[np.ndarray] = []
    dA = np.full(n, np.inf)
    W = np.arange(n)
    state = CentersState(V, np.empty(0, np.int64), np.empty((0, n)), dA, s, T, K)

    while len(W):
        state.passes += 1
        new = sample(W, s, rng)
        if len(new):
            R = session.q_d_rows(V[new], V, thr)
            rows.append(R)
            centers.append(V[new])
            dA = np.minimum(dA, R.min(axis=0))
        if not centers:
            # d(A, .) is undefined for empty A; with s < 5 the cutoff
            # exceeds n and every candidate would otherwise be dropped
            continue

        est = np.empty(len(W))
        step = max(1, _ESTIMATE_CHUNK // T)
        for lo in range(0, len(W), step):
            chunk = W[lo : lo + step]
            X = rng.integers(0, n, size=(len(chunk), T))
            d = session.q_d_pairs(np.repeat(V[chunk], T), V[X.ravel()], thr).reshape(X.shape)
            est[lo : lo + step] = np.count_nonzero(d < dA[X], axis=1) * (n / T)
        keep = est >= cutoff
        state.removal_estimates.append(est[~keep])
        W = W[keep]

    if centers:
        state.centers = np.concatenate(centers)
        state.rows = np.concatenate(rows)
    state.dist_to_centers = dA
    return state


@dataclass
class SubCallRecord:
    """One completed cover run (RECONSTRUCT-SUB or its no-threshold variant)."""

    thr: float
    vertices: np.ndarray
    edges: Edges
    attempts: int
    n_centers: int
    cells: list[np.ndarray] | None = None
    neighborhoods: list[np.ndarray] | None = None


Neighborhood = Callable[[int, int, CentersState], np.ndarray]


def cover(
    session: OracleSession,
    V,
    thr: float,
    rng: np.random.Generator,
    s: float,
    neighborhood: Neighborhood,
    *,
    K: float = K_DEFAULT,
    keep_cells: bool = False,
) -> tuple[Edges, CentersState, list[np.ndarray] | None, list[np.ndarray] | None]:
    """Shared body of the cover subroutines.

    For each centre ``a`` with neighbourhood ``N``: query ``N x V``, form the
    strict cells ``C(b) = {v : d(b, v) < d(A, v)}`` for ``b`` in ``N``, take
    ``D_a = N | union C(b)`` and query every pair of ``D_a`` for edges.
    """
    V = _vset(V)
    state = estimated_centers(session, V, s, thr, rng, K=K)
    dA = state.dist_to_centers
    edges: Edges = {}
    cells = [] if keep_cells else None
    hoods = [] if keep_cells else None
    for i, a in enumerate(state.centers):
        hood = neighborhood(int(a), i, state)
        R = session.q_d_rows(hood, V, thr)
        in_cell = (R < dA).any(axis=0) if len(hood) else np.zeros(len(V), bool)
        Da = np.union1d(V[in_cell], hood)
        edges.update(exhaustive_query(session, Da, thr))
        if keep_cells:
            cells.append(Da)
            hoods.append(hood)
    return edges, state, cells, hoods


def reconstruct_sub(
    session: OracleSession,
    V,
    thr: float,
    rng: np.random.Generator,
    *,
    K: float = K_DEFAULT,
    s: float | None = None,
    s_factor: float = 1.0,
    keep_cells: bool = False,
) -> Edges:
    """One cover pass with ``s = D * sqrt(n)`` and two-hop neighbourhoods."""
    edges, *_ = _reconstruct_sub(
        session, V, thr, rng, K=K, s=s, s_factor=s_factor, keep_cells=keep_cells
    )
    return edges


def default_s(session: OracleSession, n: int, factor: float = 1.0) -> float:
    """Centre sample size ``factor * D * sqrt(n)``."""
    return factor * session.max_degree * math.sqrt(n)


def _reconstruct_sub(session, V, thr, rng, *, K, s, keep_cells, s_factor=1.0):
    V = _vset(V)
    if s is None:
        s = default_s(session, len(V), s_factor)

    def two_hop(a: int, i: int, state: CentersState) -> np.ndarray:
        return find_neighbors(session, V, a, thr)

    return cover(session, V, thr, rng, s, two_hop, K=K, keep_cells=keep_cells)


def default_budget(session: OracleSession, n: int, c_q: float = C_Q_DEFAULT) -> int:
    """``c_q * D^3 * n^1.5 * ln(n)^2 * max(1, ln ln n)``."""
    D = max(session.max_degree, 1)
    ln = math.log(max(n, 2))
    return math.ceil(c_q * D**3 * n**1.5 * ln**2 * loglog(n))


def _budget_for(attempt: int, budget, fallback: int) -> int | None:
    if budget is None:
        return fallback
    if isinstance(budget, Sequence):
        return budget[min(attempt, len(budget) - 1)]
    return budget


def retry(
    session: OracleSession,
    run: Callable[[], tuple],
    budget,
    fallback: int,
    max_attempts: int,
) -> tuple[tuple, int]:
    """Run ``run`` under a per-attempt budget until one attempt completes."""
    for attempt in range(max_attempts):
        session.begin_attempt(_budget_for(attempt, budget, fallback))
        try:
            out = run()
        except BudgetExhausted:
            continue
        finally:
            session.end_attempt()
        return out, attempt + 1
    raise GaveUp(f"no attempt finished within budget after {max_attempts} tries")


def reconstruct(
    session: OracleSession,
    V,
    thr: float,
    rng: np.random.Generator,
    *,
    K: float = K_DEFAULT,
    c_q: float = C_Q_DEFAULT,
    budget: int | Sequence[int | None] | None = None,
    max_attempts: int = MAX_ATTEMPTS,
    s: float | None = None,
    s_factor: float = 1.0,
    keep_cells: bool = False,
    log: list | None = None,
) -> Edges:
    """Budgeted, restarting wrapper around :func:`reconstruct_sub`.

    ``budget`` overrides the default per-attempt limit; a sequence gives one
    limit per attempt (the last one repeats, ``None`` means unlimited).
    Completed runs are appended to ``log`` as :class:`SubCallRecord`.
    """
    V = _vset(V)
    fallback = default_budget(session, len(V), c_q)
    (edges, state, cells, hoods), attempts = retry(
        session,
        lambda: _reconstruct_sub(
            session, V, thr, rng, K=K, s=s, s_factor=s_factor, keep_cells=keep_cells
        ),
        budget,
        fallback,
        max_attempts,
    )
    if log is not None:
        log.append(SubCallRecord(thr, V, edges, attempts, len(state.centers), cells, hoods))
    return edges


@dataclass
class IterationRecord:
    j: int
    thr: float
    component_sizes: list[int]
    paths: list[str]
    edges: Edges

    @property
    def largest(self) -> int:
        return max(self.component_sizes)


@dataclass
class ReconstructionResult:
    edges: Edges
    ledger: dict
    iterations: list[IterationRecord] = field(default_factory=list)
    sub_calls: list[SubCallRecord] = field(default_factory=list)
    break_iteration: int = 0
    broke: bool = False
    attempts: int = 0


def lbl_r(
    session: OracleSession,
    V=None,
    rng: np.random.Generator | None = None,
    *,
    K: float = K_DEFAULT,
    c_q: float = C_Q_DEFAULT,
    budget=None,
    max_attempts: int = MAX_ATTEMPTS,
    s_factor: float = 1.0,
    keep_cells: bool = False,
) -> ReconstructionResult:
    """Recover every edge by sweeping thresholds ``1, 2, 4, ...``.

    In iteration ``j`` the layer ``G[w >= 2**j]`` is split into components;
    components with at most ``ceil(n**(1/4))`` vertices are queried
    exhaustively, larger ones go through :func:`reconstruct`. The sweep stops
    early once every component is small.
    """
    if V is None:
        V = np.arange(session.n)
    V = _vset(V)
    rng = np.random.default_rng() if rng is None else rng
    n = len(V)
    cutoff = quarter_root_ceil(n)
    last = floor_log2(session.announced_wmax)

    result = ReconstructionResult({}, {})
    for j in range(last + 1):
        thr = float(2**j)
        comps = find_connected_components(session, V, thr)
        found: Edges = {}
        paths = []
        for c in comps:
            if len(c) <= cutoff:
                found.update(exhaustive_query(session, c, thr))
                paths.append("exhaustive")
            else:
                found.update(
                    reconstruct(
                        session, c, thr, rng, K=K, c_q=c_q, budget=budget,
                        max_attempts=max_attempts, s_factor=s_factor,
                        keep_cells=keep_cells, log=result.sub_calls,
                    )
                )
                paths.append("reconstruct")
        result.edges.update(found)
        sizes = [len(c) for c in comps]
        result.iterations.append(IterationRecord(j, thr, sizes, paths, found))
        result.break_iteration = j
        if max(sizes) <= cutoff:
            result.broke = True
            break

    result.attempts = sum(rec.attempts for rec in result.sub_calls)
    result.edges = dict(sorted(result.edges.items()))
    result.ledger = session.ledger.snapshot()
    return result
