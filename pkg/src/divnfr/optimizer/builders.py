"""Linear programs for network-friendly recommendation.

Decision variables are the joint flows ``f[i, j] = r[i, j] * p[i]`` (the
long-run rate at which ``j`` is recommended after ``i``) and the demand
``p`` itself.  In those variables the demand recursion and the policy
constraints are linear:

* quality     ``sum_j u[i, j] f[i, j] >= q * q_max[i] * p[i]``
* list size   ``sum_j f[i, j] = N p[i]``
* domination  ``f[i, j] <= p[i]``  (so that ``r[i, j] <= 1``)
* balance     ``p[j] - alpha/N sum_i f[i, j] = (1 - alpha) p0[j]``

The diversity extension adds one surrogate ``d[i] >= p[i] ln p[i]`` per
item (enforced through a cut family) and the floor
``sum_i d[i] <= -b H(p_bs)``.  Fairness blocks bound the distance between
``p`` and the baseline demand.

Row and column order depend only on the inputs, so equal inputs give
identical programs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..lp import LinearProgram
from .cuts import DEFAULT_STEP, kl_log_cuts

FAIR_KINDS = ("max", "tv", "kl")


@dataclass(frozen=True)
class FairnessSpec:
    kind: str
    c_f: float
    step: float = DEFAULT_STEP
    M_kl: int = 100

    def __post_init__(self):
        if self.kind not in FAIR_KINDS:
            raise ConfigError(f"unknown fairness metric {self.kind!r}; expected one of {FAIR_KINDS}")
        if self.c_f < 0:
            raise ConfigError("fairness bound c_f must be >= 0")
        if self.kind == "kl" and (self.step <= 0 or self.M_kl < 1):
            raise ConfigError("KL fairness needs a positive step and M_kl >= 1")


def _costs(profile, c):
    c = profile.costs if c is None else np.asarray(c, dtype=float)
    if c.shape != (profile.K,):
        raise ConfigError(f"cost vector has shape {c.shape}, expected ({profile.K},)")
    return c


def _check(profile, cfg):
    if cfg.K != profile.K or cfg.N != profile.N or not math.isclose(cfg.alpha, profile.alpha):
        raise ConfigError(
            f"scenario (K={cfg.K}, N={cfg.N}, alpha={cfg.alpha}) does not match the "
            f"baseline profile (K={profile.K}, N={profile.N}, alpha={profile.alpha})")


def _nfr_core(profile, cfg, c, name):
    _check(profile, cfg)
    c = _costs(profile, c)
    K, N, alpha = profile.K, profile.N, profile.alpha
    U = profile.relevance
    lp = LinearProgram(name)
    f = lp.add_block("f", (K, K), lower=0.0, upper=np.inf)
    p = lp.add_block("p", (K,), lower=0.0, upper=1.0)
    for i in range(K):
        lp.set_bounds(int(f[i, i]), lower=0.0, upper=0.0)
    lp.set_objective(p, c)

    for i in range(K):
        lp.add_constraint(np.append(f[i], p[i]),
                          np.append(U[i], -cfg.q * profile.q_max[i]),
                          ">=", 0.0, name=f"quality[{i + 1}]")
    for i in range(K):
        lp.add_constraint(np.append(f[i], p[i]), np.append(np.ones(K), -N),
                          "=", 0.0, name=f"listsize[{i + 1}]")
    for i in range(K):
        for j in range(K):
            lp.add_constraint([f[i, j], p[i]], [1.0, -1.0], "<=", 0.0,
                              name=f"dominate[{i + 1},{j + 1}]")
    for j in range(K):
        lp.add_constraint(np.append(p[j], f[:, j]),
                          np.append(1.0, np.full(K, -alpha / N)),
                          "=", (1.0 - alpha) * profile.p0[j], name=f"balance[{j + 1}]")
    return lp


def _add_diversity(lp, profile, cfg, cuts):
    K = profile.K
    p = lp.block("p")
    d = lp.add_block("d", (K,), lower=-np.inf, upper=np.inf)
    lp.add_constraint(d, np.ones(K), "<=", -cfg.b * profile.entropy_bs, name="entropy")
    for i in range(K):
        for m, (a, icpt) in enumerate(zip(cuts.slopes, cuts.intercepts)):
            lp.add_constraint([p[i], d[i]], [a, -1.0], "<=", -icpt,
                              name=f"cut[{i + 1},{m + 1}]")


def _add_fairness(lp, profile, fair):
    K = profile.K
    p = lp.block("p")
    pbs = profile.demand_bs
    if fair.kind == "max":
        for i in range(K):
            lp.add_constraint([p[i]], [1.0], "<=", pbs[i] + fair.c_f, name=f"fmax_hi[{i + 1}]")
            lp.add_constraint([p[i]], [-1.0], "<=", fair.c_f - pbs[i], name=f"fmax_lo[{i + 1}]")
    elif fair.kind == "tv":
        z = lp.add_block("z", (K,), lower=0.0, upper=np.inf)
        for i in range(K):
            lp.add_constraint([p[i], z[i]], [-1.0, -1.0], "<=", -pbs[i], name=f"ftv_lo[{i + 1}]")
            lp.add_constraint([p[i], z[i]], [1.0, -1.0], "<=", pbs[i], name=f"ftv_hi[{i + 1}]")
        lp.add_constraint(z, np.ones(K), "<=", fair.c_f, name="ftv_budget")
    else:
        # z[i] stands in for ln p[i] from above, through tangents of ln.
        z = lp.add_block("z", (K,), lower=-np.inf, upper=np.inf)
        slopes, intercepts = kl_log_cuts(fair.M_kl, fair.step)
        for i in range(K):
            for m, (a, icpt) in enumerate(zip(slopes, intercepts)):
                lp.add_constraint([z[i], p[i]], [1.0, -a], "<=", icpt,
                                  name=f"fkl_cut[{i + 1},{m + 1}]")
        support = pbs > 0.0
        neg_entropy = float(np.sum(pbs[support] * np.log(pbs[support])))
        lp.add_constraint(z[support], pbs[support], ">=", neg_entropy - fair.c_f,
                          name="fkl_budget")


def build_nfr_lp(profile, cfg, c=None):
    """Plain cost-minimizing program (no entropy floor)."""
    return _nfr_core(profile, cfg, c, "nfr").seal()


def build_diverse_lp(profile, cfg, c=None, cuts=None):
    """Cost minimization with the linearized demand-entropy floor."""
    if cuts is None:
        raise ConfigError("build_diverse_lp needs a cut family")
    lp = _nfr_core(profile, cfg, c, "divnfr")
    _add_diversity(lp, profile, cfg, cuts)
    return lp.seal()


def build_fair_lp(profile, cfg, c=None, fair=None):
    """Cost minimization under a fairness bound only."""
    if fair is None:
        raise ConfigError("build_fair_lp needs a fairness spec")
    lp = _nfr_core(profile, cfg, c, "fairnfr")
    _add_fairness(lp, profile, fair)
    return lp.seal()


def build_fair_diverse_lp(profile, cfg, c=None, cuts=None, fair=None):
    """Entropy floor and fairness bound together."""
    if cuts is None or fair is None:
        raise ConfigError("build_fair_diverse_lp needs a cut family and a fairness spec")
    lp = _nfr_core(profile, cfg, c, "fdivnfr")
    _add_diversity(lp, profile, cfg, cuts)
    _add_fairness(lp, profile, fair)
    return lp.seal()
