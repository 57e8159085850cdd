"""HiGHS backend through :func:`scipy.optimize.linprog`.

Used for the programs the dense simplex is too slow for (``K`` in the
tens with 100 cuts per item).  Both backends return the same
:class:`SolveReport`, with the violation measured by the same code.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .model import SolveReport, constraint_violation

_STATUS = {0: "optimal", 1: "iteration_limit", 2: "infeasible", 3: "unbounded",
           4: "iteration_limit"}

HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
    "presolve": True,
}


def solve_highs(lp, tol=1e-9, max_iter=None):
    lp.seal()
    senses = np.array(lp.senses)
    A = lp.A
    ub_rows = np.flatnonzero(senses != "=")
    eq_rows = np.flatnonzero(senses == "=")
    sign = np.where(senses[ub_rows] == ">=", -1.0, 1.0)
    A_ub = sp.diags(sign) @ A[ub_rows] if ub_rows.size else None
    b_ub = sign * lp.rhs[ub_rows] if ub_rows.size else None
    A_eq = A[eq_rows] if eq_rows.size else None
    b_eq = lp.rhs[eq_rows] if eq_rows.size else None
    bounds = np.column_stack([
        np.where(np.isfinite(lp.lower), lp.lower, -np.inf),
        np.where(np.isfinite(lp.upper), lp.upper, np.inf),
    ])
    options = dict(HIGHS_OPTIONS, dual_feasibility_tolerance=max(tol, 1e-10))
    if max_iter is not None:
        options["maxiter"] = int(max_iter)
    res = linprog(lp.c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs", options=options)
    status = _STATUS.get(res.status, "iteration_limit")
    x = np.asarray(res.x, dtype=float) if res.x is not None else np.zeros(lp.n_vars)
    if status == "infeasible":
        value = math.nan
    elif status == "unbounded":
        value = -math.inf
    else:
        value = float(lp.c @ x)
    return SolveReport(
        status=status, objective_value=value, x=x,
        iterations=int(getattr(res, "nit", 0) or 0),
        max_constraint_violation=constraint_violation(lp, x),
        variable_names=lp.variable_names, backend="highs", message=str(res.message))
