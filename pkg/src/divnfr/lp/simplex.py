"""Two-phase primal simplex on a dense tableau.

Meant for desk-scale programs (a few thousand rows at most).  Pricing is
Dantzig's most-negative reduced cost until the method stalls on a run of
degenerate pivots, after which Bland's rule takes over for good, which
rules out cycling.  The tableau is rebuilt from the original data every
``REFACTOR_EVERY`` pivots to keep round-off from accumulating.
"""

from __future__ import annotations

import math

import numpy as np

from .model import FEAS_TOL, OPT_TOL, PIVOT_TOL, SolveReport, constraint_violation

REFACTOR_EVERY = 50
STALL_LIMIT = 30


class _StandardForm:
    """``min c.y  s.t.  A y = b, y >= 0`` with ``x = x0 + T y``."""

    def __init__(self, lp):
        A, c, lo, hi, senses, rhs = lp.dense()
        m, n = A.shape
        x0 = np.zeros(n)
        cols = []           # (original column, sign) per y variable
        extra_rows = []     # (y index, upper bound) for y <= u - l
        for j in range(n):
            l, u = lo[j], hi[j]
            if math.isfinite(l) and math.isfinite(u) and l == u:
                x0[j] = l
            elif math.isfinite(l):
                x0[j] = l
                cols.append((j, 1.0))
                if math.isfinite(u):
                    extra_rows.append((len(cols) - 1, u - l))
            elif math.isfinite(u):
                x0[j] = u
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        ny = len(cols)
        T = np.zeros((n, ny))
        for k, (j, s) in enumerate(cols):
            T[j, k] = s
        self.x0, self.T, self.n_struct = x0, T, ny

        rows_A = [A @ T] if m else []
        rows_b = [rhs - A @ x0] if m else []
        sense_list = list(senses)
        if extra_rows:
            E = np.zeros((len(extra_rows), ny))
            for r, (k, ub) in enumerate(extra_rows):
                E[r, k] = 1.0
            rows_A.append(E)
            rows_b.append(np.array([ub for _, ub in extra_rows]))
            sense_list += ["<="] * len(extra_rows)
        M = np.vstack(rows_A) if rows_A else np.zeros((0, ny))
        b = np.concatenate(rows_b) if rows_b else np.zeros(0)
        mm = M.shape[0]

        n_slack = sum(1 for s in sense_list if s != "=")
        S = np.zeros((mm, n_slack))
        slack_of_row = [-1] * mm
        k = 0
        for r, s in enumerate(sense_list):
            if s == "<=":
                S[r, k] = 1.0
            elif s == ">=":
                S[r, k] = -1.0
            if s != "=":
                slack_of_row[r] = ny + k
                k += 1
        A_std = np.hstack([M, S])
        flip = b < 0
        A_std[flip] *= -1.0
        b = np.where(flip, -b, b)
        self.A = A_std
        self.b = b
        self.c = np.concatenate([T.T @ c, np.zeros(n_slack)])
        self.obj_offset = float(c @ x0)
        # a slack that ends up with +1 can start in the basis
        self.initial = []
        for r in range(mm):
            j = slack_of_row[r]
            self.initial.append(j if j >= 0 and A_std[r, j] > 0 else -1)

    def to_x(self, y):
        return self.x0 + self.T @ y[: self.n_struct]


class _Tableau:
    def __init__(self, A, b, cost, basis):
        self.A0, self.b0 = A, b
        self.cost = cost
        self.basis = list(basis)
        self.since_refactor = 0
        self.refactor()

    def refactor(self):
        B = self.A0[:, self.basis]
        try:
            self.body = np.linalg.solve(B, self.A0)
            self.rhs = np.linalg.solve(B, self.b0)
        except np.linalg.LinAlgError:
            return
        self.rhs[np.abs(self.rhs) < 1e-13] = 0.0
        self.d = self.cost - self.cost[self.basis] @ self.body
        self.since_refactor = 0

    def set_cost(self, cost):
        self.cost = cost
        self.d = cost - cost[self.basis] @ self.body

    def pivot(self, r, e):
        piv = self.body[r, e]
        self.body[r] /= piv
        self.rhs[r] /= piv
        col = self.body[:, e].copy()
        col[r] = 0.0
        self.body -= np.outer(col, self.body[r])
        self.rhs -= col * self.rhs[r]
        self.d = self.d - self.d[e] * self.body[r]
        self.basis[r] = e
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def objective(self):
        return float(self.cost[self.basis] @ self.rhs)

    def delete_row(self, r):
        keep = np.arange(self.body.shape[0]) != r
        self.body = self.body[keep]
        self.rhs = self.rhs[keep]
        self.A0 = self.A0[keep]
        self.b0 = self.b0[keep]
        del self.basis[r]


def _run(tab, allowed, tol, max_iter, counter):
    """Iterate until optimal / unbounded / out of budget.

    ``allowed`` masks columns that may enter.  Returns a status string.
    """
    bland = False
    stall = 0
    while True:
        if counter[0] >= max_iter:
            return "iteration_limit"
        d = np.where(allowed, tab.d, 0.0)
        candidates = np.flatnonzero(d < -tol)
        if candidates.size == 0:
            return "optimal"
        e = int(candidates[0]) if bland else int(candidates[np.argmin(d[candidates])])
        col = tab.body[:, e]
        pos = np.flatnonzero(col > PIVOT_TOL)
        if pos.size == 0:
            return "unbounded"
        ratios = tab.rhs[pos] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-12 * (1.0 + abs(best))]
        if bland:
            r = int(min(ties, key=lambda i: tab.basis[i]))
        else:
            r = int(ties[np.argmax(np.abs(col[ties]))])
        step = tab.rhs[r] / col[r]
        tab.pivot(r, e)
        counter[0] += 1
        if step <= 1e-12:
            stall += 1
            if stall >= STALL_LIMIT:
                bland = True
        else:
            stall = 0


def _objective(status, value):
    if status == "infeasible":
        return math.nan
    if status == "unbounded":
        return -math.inf
    return float(value)


def solve(lp, tol=OPT_TOL, max_iter=50_000):
    """Solve ``lp`` (a minimization) and return a :class:`SolveReport`."""
    lp.seal()
    sf = _StandardForm(lp)
    m, ny = sf.A.shape
    names = lp.variable_names

    def report(status, y, iters, message=""):
        x = sf.to_x(y)
        return SolveReport(
            status=status, objective_value=_objective(status, lp.c @ x),
            x=x, iterations=iters, max_constraint_violation=constraint_violation(lp, x),
            variable_names=names, backend="simplex", message=message)

    if m == 0:
        if np.any(sf.c < -tol):
            return report("unbounded", np.zeros(ny), 0)
        return report("optimal", np.zeros(ny), 0)

    # phase 1: artificials where no slack can start basic
    need = [r for r in range(m) if sf.initial[r] < 0]
    n_art = len(need)
    art = np.zeros((m, n_art))
    basis = list(sf.initial)
    for k, r in enumerate(need):
        art[r, k] = 1.0
        basis[r] = ny + k
    A1 = np.hstack([sf.A, art])
    cost1 = np.concatenate([np.zeros(ny), np.ones(n_art)])
    tab = _Tableau(A1, sf.b.copy(), cost1, basis)
    counter = [0]
    allowed = np.ones(ny + n_art, dtype=bool)
    if n_art:
        status = _run(tab, allowed, tol, max_iter, counter)
        if status == "iteration_limit":
            y = np.zeros(ny + n_art)
            y[tab.basis] = tab.rhs
            return report("iteration_limit", y[:ny], counter[0], "phase 1 did not finish")
        scale = 1.0 + float(np.max(np.abs(sf.b), initial=0.0))
        if tab.objective() > FEAS_TOL * scale:
            y = np.zeros(ny + n_art)
            y[tab.basis] = tab.rhs
            return report("infeasible", y[:ny], counter[0])
        # drive zero-level artificials out, dropping redundant rows
        r = 0
        while r < len(tab.basis):
            if tab.basis[r] >= ny:
                row = tab.body[r, :ny]
                cand = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                if cand.size:
                    tab.pivot(r, int(cand[np.argmax(np.abs(row[cand]))]))
                else:
                    tab.delete_row(r)
                    continue
            r += 1
    # phase 2
    keep = np.arange(ny)
    tab.A0 = tab.A0[:, keep]
    tab.body = tab.body[:, keep]
    tab.set_cost(sf.c.copy())
    tab.refactor()
    status = _run(tab, np.ones(ny, dtype=bool), tol, max_iter, counter)
    y = np.zeros(ny)
    y[tab.basis] = np.maximum(tab.rhs, 0.0)
    return report(status, y, counter[0])
