"""No-threshold reconstruction of connected graphs.

All queries use threshold 1. The two-hop neighbourhood scan is replaced by
the closed distance ball of radius ``2 * W_max`` around each centre, read
off distances that centre selection already queried, so weight-heavy paths
still land inside some extended cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from wgrecon.errors import Unsupported
from wgrecon.oracle import OracleSession
from wgrecon.recon import (
    C_Q_DEFAULT,
    K_DEFAULT,
    MAX_ATTEMPTS,
    CentersState,
    Edges,
    ReconstructionResult,
    SubCallRecord,
    _vset,
    cover,
    retry,
)

THR = 1.0


@dataclass(frozen=True)
class BallParams:
    n: int
    max_degree: int
    w_max: float
    b: float
    s: float
    budget: int


def ball_size_bound(D: int, w_max: float) -> float:
    """``(D**(2 W_max + 1) - 1) / (D - 1)``, the ball-size bound.

    Raises :class:`Unsupported` when ``D**(2 W_max + 1)`` exceeds ``2**53``.
    """
    if D <= 1:
        return math.floor(2 * w_max) + 1.0
    expo = 2 * w_max + 1
    if expo * math.log2(D) > 53:
        raise Unsupported(f"D={D}, W_max={w_max}: D^(2W_max+1) exceeds 2^53")
    return (D**expo - 1) / (D - 1)


def ball_params(n: int, D: int, w_max: float, c_q: float = C_Q_DEFAULT) -> BallParams:
    b = ball_size_bound(D, w_max)
    s = min(math.sqrt(b * n), float(n))
    budget = math.ceil(c_q * n**1.5 * b**1.5)
    return BallParams(n, D, w_max, b, s, budget)


def closed_ball(a: int, r: float, dists, vertices=None) -> np.ndarray:
    """``{v : d(a, v) <= r}`` from a precomputed distance row.

    ``dists[i]`` is the distance from ``a`` to ``vertices[i]`` (or to vertex
    ``i`` when ``vertices`` is omitted).
    """
    dists = np.asarray(dists, dtype=np.float64)
    ids = np.arange(len(dists)) if vertices is None else np.asarray(vertices)
    return ids[dists <= r]


def _nt_rs(session, V, rng, *, K, s, keep_cells):
    V = _vset(V)
    radius = 2 * session.announced_wmax
    if s is None:
        s = ball_params(len(V), session.max_degree, session.announced_wmax).s

    def ball(a: int, i: int, state: CentersState) -> np.ndarray:
        row = state.rows[i]
        if np.isinf(row).any():
            raise Unsupported("hidden graph is disconnected")
        return closed_ball(a, radius, row, state.vertices)

    return cover(session, V, THR, rng, s, ball, K=K, keep_cells=keep_cells)


def nt_rs(
    session: OracleSession,
    V,
    rng: np.random.Generator,
    *,
    K: float = K_DEFAULT,
    s: float | None = None,
    keep_cells: bool = False,
) -> Edges:
    edges, *_ = _nt_rs(session, V, rng, K=K, s=s, keep_cells=keep_cells)
    return edges


def nt_r(
    session: OracleSession,
    V=None,
    rng: np.random.Generator | None = None,
    *,
    K: float = K_DEFAULT,
    c_q: float = C_Q_DEFAULT,
    budget=None,
    max_attempts: int = MAX_ATTEMPTS,
    keep_cells: bool = False,
) -> ReconstructionResult:
    """Restarting wrapper around :func:`nt_rs` with budget ``c_q (n b)^1.5``."""
    if V is None:
        V = np.arange(session.n)
    V = _vset(V)
    rng = np.random.default_rng() if rng is None else rng
    params = ball_params(len(V), session.max_degree, session.announced_wmax, c_q)
    (edges, state, cells, hoods), attempts = retry(
        session,
        lambda: _nt_rs(session, V, rng, K=K, s=params.s, keep_cells=keep_cells),
        budget,
        params.budget,
        max_attempts,
    )
    rec = SubCallRecord(THR, V, edges, attempts, len(state.centers), cells, hoods)
    return ReconstructionResult(
        dict(sorted(edges.items())),
        session.ledger.snapshot(),
        sub_calls=[rec],
        attempts=attempts,
    )
