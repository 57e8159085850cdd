"""Brute-force vertex enumeration, used only to check the simplex."""

from __future__ import annotations

import itertools
import math

import numpy as np

from ..errors import ConfigError

MAX_ORACLE_VARS = 12


def vertex_oracle(lp, tol=1e-9):
    """Minimum objective over all basic feasible solutions of ``lp``.

    Every row and every finite bound is a candidate hyperplane; each choice
    of ``n`` linearly independent ones gives a basic solution.  Returns
    ``math.inf`` when none is feasible.  The feasible region is assumed
    bounded (unboundedness is not detected).
    """
    A, c, lo, hi, senses, rhs = lp.dense()
    m, n = A.shape
    if n > MAX_ORACLE_VARS:
        raise ConfigError(f"vertex oracle refuses {n} variables (max {MAX_ORACLE_VARS})")
    if n == 0:
        return 0.0

    planes, values = [], []
    for i in range(m):
        planes.append(A[i])
        values.append(rhs[i])
    eye = np.eye(n)
    for j in range(n):
        for bound in (lo[j], hi[j]):
            if math.isfinite(bound):
                planes.append(eye[j])
                values.append(bound)
    H = np.array(planes).reshape(-1, n)
    h = np.array(values)
    if H.shape[0] < n:
        return math.inf

    lo_slack = tol * (1 + np.abs(np.where(np.isfinite(lo), lo, 0.0)))
    hi_slack = tol * (1 + np.abs(np.where(np.isfinite(hi), hi, 0.0)))
    combos = np.array(list(itertools.combinations(range(H.shape[0]), n)))
    best = math.inf
    for chunk in np.array_split(combos, max(1, len(combos) // 20000 + 1)):
        Bs = H[chunk]
        bs = h[chunk]
        det = np.linalg.det(Bs)
        ok = np.abs(det) > 1e-10
        if not ok.any():
            continue
        X = np.linalg.solve(Bs[ok], bs[ok][..., None])[..., 0]
        feasible = np.all(X >= lo - lo_slack, axis=1) & np.all(X <= hi + hi_slack, axis=1)
        if m:
            AX = X @ A.T
            slack = tol * (1 + np.abs(rhs))
            for i, s in enumerate(senses):
                if s == "<=":
                    feasible &= AX[:, i] <= rhs[i] + slack[i]
                elif s == ">=":
                    feasible &= AX[:, i] >= rhs[i] - slack[i]
                else:
                    feasible &= np.abs(AX[:, i] - rhs[i]) <= slack[i]
        if feasible.any():
            best = min(best, float((X[feasible] @ c).min()))
    return best
