"""Solving the programs, recovering the policy, and checking the result
against the original nonlinear model."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..demand import (check_policy, entropy_of_demand, expected_cost,
                      stationary_demand, total_variation)
from ..errors import SolverStatusError
from ..lp import solve
from .cuts import kl_log_cuts, xlogx

MIN_DEMAND = 1e-12


@dataclass
class DiverseSolution:
    f: np.ndarray
    p_nf: np.ndarray
    d: np.ndarray | None
    policy: np.ndarray
    realized_entropy: float
    claimed_entropy: float
    cost: float
    entropy_gap: float
    report: object = field(repr=False, default=None)
    z: np.ndarray | None = None
    # rows that fell back to the baseline list because p[i] was ~0
    fallback_rows: tuple = ()

    @property
    def iterations(self):
        return self.report.iterations if self.report is not None else 0


def recover_policy(f, p, fallback):
    """``r[i, j] = f[i, j] / p[i]``; rows with vanishing demand keep the
    baseline row."""
    f = np.asarray(f, dtype=float)
    p = np.asarray(p, dtype=float)
    R = np.array(fallback, dtype=float)
    live = p > MIN_DEMAND
    R[live] = f[live] / p[live, None]
    np.fill_diagonal(R, 0.0)
    # undo solver noise just outside [0, 1]
    R = np.clip(R, 0.0, 1.0)
    return R, tuple(int(i) for i in np.flatnonzero(~live))


def _tight_surrogates(lp, x):
    """Smallest ``d`` allowed by the cut rows at the solved ``p``.

    When the entropy row is slack the solver may leave ``d[i]`` anywhere
    above its cut envelope; lowering it to the envelope keeps every row
    satisfied and makes ``-sum(d)`` the surrogate entropy of ``p``.
    """
    d_cols = lp.block("d")
    rows = np.array([k for k, r in enumerate(lp.row_names) if r.startswith("cut[")])
    if rows.size == 0:
        return x[d_cols]
    A = lp.A[rows].tocsr()
    x_wo = np.array(x, dtype=float)
    x_wo[d_cols] = 0.0
    # each cut row reads  a p_i - d_i <= rhs,  i.e.  d_i >= a p_i - rhs
    need = A @ x_wo - lp.rhs[rows]
    owner = np.asarray(A[:, d_cols].argmin(axis=1)).ravel()
    d = np.full(d_cols.size, -np.inf)
    np.maximum.at(d, owner, need)
    return d


def solve_and_recover(lp, profile, cfg=None, backend="highs", tol=1e-9, max_iter=None):
    """Solve one of the builder programs and map it back to a policy.

    Raises :class:`SolverStatusError` unless the solver reports optimal.
    """
    kwargs = {"tol": tol}
    if max_iter is not None:
        kwargs["max_iter"] = max_iter
    report = solve(lp, backend=backend, **kwargs)
    if report.status != "optimal":
        raise SolverStatusError(report.status, report, lp.name)
    x = report.x
    f = np.clip(lp.block_values("f", x), 0.0, None)
    p = lp.block_values("p", x)
    d = _tight_surrogates(lp, x) if lp.has_block("d") else None
    z = lp.block_values("z", x) if lp.has_block("z") else None
    policy, fallback = recover_policy(f, p, profile.policy)
    realized = entropy_of_demand(np.clip(p, 0.0, None))
    claimed = float(-d.sum()) if d is not None else 0.0
    return DiverseSolution(
        f=f, p_nf=p, d=d, z=z, policy=policy,
        realized_entropy=realized, claimed_entropy=claimed,
        cost=float(report.objective_value),
        entropy_gap=claimed - realized, report=report, fallback_rows=fallback)


def fairness_metrics(p_nf, p_bs):
    """``(F_max, F_TV, F_KL)`` between the optimized and baseline demand."""
    p_nf = np.asarray(p_nf, dtype=float)
    p_bs = np.asarray(p_bs, dtype=float)
    diff = np.abs(p_nf - p_bs)
    support = p_bs > 0.0
    with np.errstate(divide="ignore"):
        kl = float(np.sum(p_bs[support] * (np.log(p_bs[support]) - np.log(p_nf[support]))))
    return float(diff.max()), 0.5 * float(diff.sum()), kl


def tangent_slack(cuts, grid=20001):
    """Largest amount by which the cut envelope undershoots ``x ln x`` on
    [0, 1].  Zero for secant families."""
    if cuts.mode == "secant":
        return 0.0
    x = np.linspace(0.0, 1.0, grid)
    x = np.union1d(x, cuts.points)
    return float(np.max(xlogx(x) - cuts.envelope(x)))


@dataclass
class ValidationReport:
    demand_tv: float
    min_quality_margin: float
    cost_from_policy: float
    cost_from_demand: float
    realized_entropy: float
    entropy_floor: float
    entropy_allowance: float
    f_max: float
    f_tv: float
    f_kl: float
    violations: list

    @property
    def ok(self):
        return not self.violations


def validate_solution(sol, profile, cfg, fair=None, cuts=None, diverse=True):
    """Re-derive everything from the recovered policy alone.

    Checks: policy shape/bounds, the stationary demand of the policy
    against ``p_nf`` (total variation <= 1e-6), per-row quality, the cost
    through the Markov-chain route against ``c . p_nf`` (1e-8), the entropy
    floor, and the fairness bound.  With tangent cuts the entropy floor is
    only guaranteed up to ``K`` times the envelope undershoot, which is
    what the check allows.  Returns a :class:`ValidationReport` listing the
    names of the violated constraints.
    """
    violations = []
    K, N, alpha = profile.K, profile.N, profile.alpha
    try:
        check_policy(sol.policy, N)
    except ValueError:
        violations.append("policy")

    p_check = stationary_demand(profile.p0, sol.policy, alpha, N)
    tv = total_variation(p_check, sol.p_nf)
    if tv > 1e-6:
        violations.append("demand_balance")

    quality = (sol.policy * profile.relevance).sum(axis=1)
    margin = float(np.min(quality - cfg.q * profile.q_max))
    if margin < -1e-6:
        violations.append("quality")

    cost_policy = expected_cost(p_check, profile.costs)
    cost_demand = expected_cost(sol.p_nf, profile.costs)
    if abs(cost_policy - cost_demand) > 1e-8:
        violations.append("cost")

    realized = entropy_of_demand(np.clip(sol.p_nf, 0.0, None))
    floor = cfg.b * profile.entropy_bs if diverse else 0.0
    allowance = 1e-7
    if diverse and cuts is not None:
        allowance += K * tangent_slack(cuts)
    if realized < floor - allowance:
        violations.append("entropy")

    f_max, f_tv, f_kl = fairness_metrics(sol.p_nf, profile.demand_bs)
    if fair is not None:
        if fair.kind == "max" and f_max > fair.c_f + 1e-7:
            violations.append("fairness_max")
        elif fair.kind == "tv" and 2.0 * f_tv > fair.c_f + 1e-7:
            violations.append("fairness_tv")
        elif fair.kind == "kl":
            # tangents of ln over-estimate it, so the LP bound is loose by
            # the tangent gap at each p[i]
            slopes, icpts = kl_log_cuts(fair.M_kl, fair.step)
            p = np.clip(sol.p_nf, MIN_DEMAND, None)
            gap = np.min(np.multiply.outer(p, slopes) + icpts, axis=1) - np.log(p)
            if f_kl > fair.c_f + float(profile.demand_bs @ gap) + 1e-7:
                violations.append("fairness_kl")

    return ValidationReport(
        demand_tv=tv, min_quality_margin=margin,
        cost_from_policy=cost_policy, cost_from_demand=cost_demand,
        realized_entropy=realized, entropy_floor=floor, entropy_allowance=allowance,
        f_max=f_max, f_tv=f_tv, f_kl=f_kl, violations=violations)


def write_solution(sol, profile, directory, extra=None):
    """Write ``flows.csv`` (``i,j,f,r``, nonzero flows), ``items.csv``
    (``i,p_nf,d``) and ``summary.csv`` (``key,value``) into ``directory``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "flows.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "f", "r"])
        for i, j in zip(*np.nonzero(sol.f > 0.0)):
            w.writerow([i + 1, j + 1, repr(float(sol.f[i, j])), repr(float(sol.policy[i, j]))])
    with (out / "items.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "p_nf", "d"])
        for i in range(profile.K):
            d = repr(float(sol.d[i])) if sol.d is not None else ""
            w.writerow([i + 1, repr(float(sol.p_nf[i])), d])
    f_max, f_tv, f_kl = fairness_metrics(sol.p_nf, profile.demand_bs)
    summary = {
        "cost": sol.cost, "cost_bs": profile.cost_bs,
        "realized_entropy": sol.realized_entropy, "claimed_entropy": sol.claimed_entropy,
        "entropy_bs": profile.entropy_bs, "entropy_gap": sol.entropy_gap,
        "f_max": f_max, "f_tv": f_tv, "f_kl": f_kl,
    }
    summary.update(extra or {})
    with (out / "summary.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["key", "value"])
        for k, v in summary.items():
            w.writerow([k, repr(v) if isinstance(v, float) else v])
    return out
