"""The platform's baseline recommender (deterministic top-N) and the
reference point every optimized policy is measured against."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .demand import entropy_of_demand, expected_cost, stationary_demand
from .errors import ConfigError, ShapeError


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def build_bsr(U, N):
    """Top-N policy and per-item best quality ``q_max``.

    Row ``i`` recommends the ``N`` items with the largest ``U[i, j]``,
    lower index first on ties.  The item itself is never eligible; when a
    row has fewer than ``N`` relevant items the remaining slots go to
    zero-score items.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ShapeError(f"relevance matrix must be square, got {U.shape}")
    K = U.shape[0]
    if N < 1 or K - 1 < N:
        raise ConfigError(f"cannot recommend N={N} items from a catalog of K={K}")
    R = np.zeros((K, K))
    for i in range(K):
        scores = U[i].copy()
        scores[i] = -np.inf
        top = np.argsort(-scores, kind="stable")[:N]
        R[i, top] = 1.0
    q_max = (R * U).sum(axis=1)
    return _frozen(R), _frozen(q_max)


@dataclass(frozen=True)
class BaselineProfile:
    relevance: np.ndarray
    p0: np.ndarray
    alpha: float
    N: int
    policy: np.ndarray
    q_max: np.ndarray
    demand_bs: np.ndarray
    costs: np.ndarray
    entropy_bs: float
    cost_bs: float

    @property
    def K(self):
        return self.p0.size


def build_baseline_profile(U, N, p0, alpha, c):
    policy, q_max = build_bsr(U, N)
    demand = _frozen(stationary_demand(p0, policy, alpha, N))
    c = _frozen(c)
    if c.shape != demand.shape:
        raise ShapeError(f"cost vector shape {c.shape} does not match K={demand.size}")
    return BaselineProfile(
        relevance=_frozen(U), p0=_frozen(p0), alpha=float(alpha), N=int(N),
        policy=policy, q_max=q_max, demand_bs=demand, costs=c,
        entropy_bs=entropy_of_demand(demand), cost_bs=expected_cost(demand, c),
    )


def baseline_for_scenario(cfg, U):
    """Profile for a scenario; the cache holds the ``C`` items with the
    highest baseline demand."""
    from .catalog import build_costs, zipf_direct_demand

    U = np.asarray(U, dtype=float)
    if U.shape != (cfg.K, cfg.K):
        raise ConfigError(f"relevance matrix is {U.shape[0]}x{U.shape[1]}, scenario has K={cfg.K}")
    p0 = zipf_direct_demand(cfg.K, cfg.pop)
    policy, _ = build_bsr(U, cfg.N)
    p_bs = stationary_demand(p0, policy, cfg.alpha, cfg.N)
    c = build_costs(p_bs, cfg.C)
    return build_baseline_profile(U, cfg.N, p0, cfg.alpha, c)


def write_profile(profile, path):
    """CSV of ``i,q_max,p_bs`` (1-based) followed by a ``# summary`` line."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "q_max", "p_bs"])
        for i, (q, p) in enumerate(zip(profile.q_max, profile.demand_bs), start=1):
            w.writerow([i, repr(float(q)), repr(float(p))])
        fh.write(f"# summary,entropy_bs={profile.entropy_bs!r},cost_bs={profile.cost_bs!r}\n")
