"""Long-run content demand under a recommendation policy.

A user session is a Markov chain over items: with probability ``alpha``
the user clicks one of the ``N`` recommendations of the current item
(chosen uniformly, so item ``j`` follows ``i`` with probability
``R[i, j] / N``), otherwise they jump to an item drawn from the direct
demand ``p0``.  The stationary distribution of that chain is

    p = (1 - alpha) * p0^T (I - (alpha / N) R)^{-1}.

Entropies use the natural logarithm with ``0 log 0 = 0``.
"""

from __future__ import annotations

import csv
import warnings
from bisect import bisect_right
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DomainError, NumericalError, ShapeError

DIST_TOL = 1e-9
POLICY_TOL = 1e-6


def check_distribution(p, tol=DIST_TOL):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ShapeError(f"distribution must be a vector, got shape {p.shape}")
    if np.any(p < -tol):
        raise DomainError("distribution has negative entries")
    if abs(p.sum() - 1.0) > tol:
        raise DomainError(f"distribution sums to {p.sum():.12g}, not 1")
    return p


def check_policy(R, N, tol=POLICY_TOL):
    """Validate a recommendation table: entries in [0, 1], zero diagonal,
    rows summing to ``N``."""
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ShapeError(f"policy must be square, got shape {R.shape}")
    if np.any(R < -tol) or np.any(R > 1.0 + tol):
        raise DomainError("policy entries must lie in [0, 1]")
    if np.any(np.abs(np.diag(R)) > tol):
        raise DomainError("policy recommends an item after itself")
    sums = R.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - N) > tol)
    if bad.size:
        raise DomainError(
            f"policy row {bad[0] + 1} sums to {sums[bad[0]]:.9g}, expected {N}")
    return R


def transition_matrix(p0, R, alpha, N):
    """Per-step transition matrix of the session chain."""
    p0 = np.asarray(p0, dtype=float)
    return (1.0 - alpha) * np.outer(np.ones(p0.size), p0) + (alpha / N) * np.asarray(R)


def stationary_demand(p0, R, alpha, N):
    """Long-run request distribution induced by ``R``.

    Solved with a dense LU factorization of ``(I - alpha/N R)^T``.
    """
    p0 = check_distribution(p0)
    R = np.asarray(R, dtype=float)
    K = p0.size
    if R.shape != (K, K):
        raise ShapeError(f"policy shape {R.shape} does not match K={K}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    A = np.eye(K) - (alpha / N) * R
    with warnings.catch_warnings():
        # a zero pivot is reported below as NumericalError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu = scipy.linalg.lu_factor(A.T, check_finite=True)
    if np.min(np.abs(np.diag(lu[0]))) == 0.0:
        raise NumericalError("demand system is singular")
    p = scipy.linalg.lu_solve(lu, (1.0 - alpha) * p0)
    if not np.all(np.isfinite(p)):
        raise NumericalError("demand system is singular")
    return p


def expected_session_frequency(p0, R, alpha, N, L):
    """Expected item frequencies over a fixed-length session of ``L`` steps
    started from ``p0``.  Tends to ``stationary_demand`` as ``L`` grows."""
    P = transition_matrix(p0, R, alpha, N)
    pt = np.array(p0, dtype=float)
    acc = np.zeros_like(pt)
    for _ in range(L):
        acc += pt
        pt = pt @ P
    return acc / L


def expected_cost(p, c):
    p = np.asarray(p, dtype=float)
    c = np.asarray(c, dtype=float)
    if p.shape != c.shape:
        raise ShapeError(f"demand shape {p.shape} does not match cost shape {c.shape}")
    return float(c @ p)


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, x * np.log(safe), 0.0)


def entropy_of_demand(p):
    return float(-_xlogx(p).sum())


def entropy_of_policy_row(R, i):
    """Per-row entropy of a recommendation table (zero for 0/1 rows)."""
    return float(-_xlogx(np.asarray(R, dtype=float)[i]).sum())


def total_variation(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


# --- Monte-Carlo sessions -------------------------------------------------


class SimulationResult(NamedTuple):
    demand: np.ndarray
    cost: float
    # standard error of each demand entry, from between-session spread
    stderr: np.ndarray


def _row_cdf(row):
    cum = np.cumsum(row)
    cum /= cum[-1]
    return cum.tolist()


def sample_recommendation_list(row, rng):
    """Draw a concrete recommendation list whose inclusion probabilities
    equal ``row`` (systematic sampling; the row sums to N, entries <= 1)."""
    row = np.asarray(row, dtype=float)
    n = int(round(row.sum()))
    cum = np.cumsum(row)
    cum[-1] = max(cum[-1], float(n))
    points = rng.random() + np.arange(n)
    picks = np.searchsorted(cum, points, side="right")
    return np.minimum(picks, row.size - 1)


def simulate_sessions(p0, R, alpha, N, L, sessions, seed, costs=None,
                      materialize_lists=False, trace=None):
    """Monte-Carlo estimate of item demand and per-request cost.

    Every session owns a generator seeded from ``(seed, session_index)``,
    so the aggregate is reproducible and independent of execution order.
    With ``materialize_lists`` each click first draws an explicit list of
    ``N`` items and picks one uniformly; otherwise item ``j`` is drawn
    directly with probability ``R[i, j] / N`` (same marginals, cheaper).

    If ``trace`` is a list, ``(session, step, item, followed, cost)`` tuples
    are appended to it (0-based session/step/item).

    Note the first item of each session comes from ``p0``, so the empirical
    demand carries a transient bias of order ``1 / ((1 - alpha) L)``
    relative to the stationary demand.
    """
    p0 = check_distribution(p0)
    R = np.asarray(R, dtype=float)
    K = p0.size
    if sessions < 1 or L < 1:
        raise DomainError("need at least one session of length >= 1")
    c = np.zeros(K) if costs is None else np.asarray(costs, dtype=float)

    cdf0 = np.cumsum(p0)
    cdf0 /= cdf0[-1]
    rows = {}
    total = np.zeros(K)
    sq = np.zeros(K)
    for s in range(sessions):
        rng = np.random.default_rng([seed, s])
        follow = rng.random(L) < alpha
        direct = np.minimum(np.searchsorted(cdf0, rng.random(L), side="right"), K - 1)
        u = rng.random(L).tolist()
        counts = np.zeros(K)
        cur = int(direct[0])
        counts[cur] += 1
        if trace is not None:
            trace.append((s, 0, cur, False, float(c[cur])))
        for t in range(1, L):
            followed = bool(follow[t])
            if followed:
                if materialize_lists:
                    lst = sample_recommendation_list(R[cur], rng)
                    cur = int(lst[int(u[t] * lst.size)])
                else:
                    cdf = rows.get(cur)
                    if cdf is None:
                        cdf = rows[cur] = _row_cdf(R[cur])
                    cur = min(bisect_right(cdf, u[t]), K - 1)
            else:
                cur = int(direct[t])
            counts[cur] += 1
            if trace is not None:
                trace.append((s, t, cur, followed, float(c[cur])))
        freq = counts / L
        total += freq
        sq += freq * freq
    demand = total / sessions
    if sessions > 1:
        var = np.maximum(sq / sessions - demand**2, 0.0) * sessions / (sessions - 1)
        stderr = np.sqrt(var / sessions)
    else:
        stderr = np.full(K, np.nan)
    return SimulationResult(demand, float(c @ demand), stderr)


def write_trace(trace, path):
    """Dump a session trace as CSV ``session,step,item,followed,cost``
    with 1-based item indices."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["session", "step", "item", "followed", "cost"])
        for s, t, item, followed, cost in trace:
            w.writerow([s, t, item + 1, int(followed), repr(cost)])
