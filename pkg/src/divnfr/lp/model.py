"""Sparse linear-program container and solve report.

Programs are always minimizations.  Variables live in named blocks (for
example ``f`` of shape ``(K, K)`` and ``p`` of shape ``(K,)``) so that
builders and result readers agree on column positions.  Constraints are
kept in relation form (``<=``, ``=``, ``>=``); any conversion to standard
form happens inside a solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigError

# All solver tolerances live here.
FEAS_TOL = 1e-7      # primal feasibility
OPT_TOL = 1e-9       # reduced-cost optimality
PIVOT_TOL = 1e-9     # smallest acceptable pivot element

SENSES = ("<=", "=", ">=")
STATUSES = ("optimal", "infeasible", "unbounded", "iteration_limit")


class LinearProgram:
    """Mutable while being built; call :meth:`seal` before solving."""

    def __init__(self, name="lp"):
        self.name = name
        self._blocks = {}
        self._names = []
        self._lower = []
        self._upper = []
        self._obj = {}
        self._row_ptr = [0]
        self._cols = []
        self._vals = []
        self._senses = []
        self._rhs = []
        self._row_names = []
        self._sealed = False

    # -- construction ------------------------------------------------------

    def _check_open(self):
        if self._sealed:
            raise ConfigError(f"linear program {self.name!r} is sealed")

    def add_block(self, name, shape=(), lower=0.0, upper=math.inf):
        """Declare a block of variables and return their column indices
        arranged in ``shape``."""
        self._check_open()
        if name in self._blocks:
            raise ConfigError(f"duplicate variable block {name!r}")
        shape = tuple(np.atleast_1d(shape).astype(int)) if shape != () else ()
        size = int(np.prod(shape)) if shape else 1
        start = len(self._names)
        idx = np.arange(start, start + size).reshape(shape)
        for flat in range(size):
            sub = np.unravel_index(flat, shape) if shape else ()
            label = name if not shape else f"{name}[{','.join(str(s + 1) for s in sub)}]"
            self._names.append(label)
        lo = np.broadcast_to(np.asarray(lower, dtype=float), shape).ravel() if shape else [float(lower)]
        hi = np.broadcast_to(np.asarray(upper, dtype=float), shape).ravel() if shape else [float(upper)]
        if any(a > b for a, b in zip(lo, hi)):
            raise ConfigError(f"block {name!r} has lower bound above upper bound")
        self._lower.extend(float(v) for v in lo)
        self._upper.extend(float(v) for v in hi)
        self._blocks[name] = (start, shape)
        return idx

    def set_bounds(self, col, lower=None, upper=None):
        self._check_open()
        if lower is not None:
            self._lower[col] = float(lower)
        if upper is not None:
            self._upper[col] = float(upper)

    def set_objective(self, cols, coefs):
        self._check_open()
        for j, v in zip(np.ravel(cols), np.ravel(coefs)):
            j = int(j)
            if j in self._obj:
                raise ConfigError(f"objective lists variable {self._names[j]} twice")
            if v != 0.0:
                self._obj[j] = float(v)

    def add_constraint(self, cols, coefs, sense, rhs, name=None):
        self._check_open()
        if sense not in SENSES:
            raise ConfigError(f"unknown relation {sense!r}")
        rhs = float(rhs)
        if not math.isfinite(rhs):
            raise ConfigError("constraint right-hand sides must be finite")
        cols = [int(j) for j in np.ravel(cols)]
        coefs = [float(v) for v in np.ravel(coefs)]
        if len(set(cols)) != len(cols):
            raise ConfigError(f"constraint {name or len(self._rhs)} repeats a variable")
        n = len(self._names)
        if any(j < 0 or j >= n for j in cols):
            raise ConfigError("constraint references an undeclared variable")
        for j, v in zip(cols, coefs):
            if v != 0.0:
                self._cols.append(j)
                self._vals.append(v)
        self._row_ptr.append(len(self._cols))
        self._senses.append(sense)
        self._rhs.append(rhs)
        self._row_names.append(name if name is not None else f"r{len(self._rhs)}")
        return len(self._rhs) - 1

    def seal(self):
        if not self._sealed:
            n = len(self._names)
            m = len(self._rhs)
            self.A = sp.csr_matrix(
                (np.array(self._vals, dtype=float), np.array(self._cols, dtype=np.int64),
                 np.array(self._row_ptr, dtype=np.int64)), shape=(m, n))
            self.c = np.zeros(n)
            for j, v in self._obj.items():
                self.c[j] = v
            self.lower = np.array(self._lower)
            self.upper = np.array(self._upper)
            self.senses = tuple(self._senses)
            self.rhs = np.array(self._rhs)
            for a in (self.c, self.lower, self.upper, self.rhs):
                a.setflags(write=False)
            self._sealed = True
        return self

    # -- inspection --------------------------------------------------------

    @property
    def sealed(self):
        return self._sealed

    @property
    def n_vars(self):
        return len(self._names)

    @property
    def n_rows(self):
        return len(self._rhs)

    @property
    def variable_names(self):
        return tuple(self._names)

    @property
    def row_names(self):
        return tuple(self._row_names)

    @property
    def blocks(self):
        return dict(self._blocks)

    def block(self, name):
        start, shape = self._blocks[name]
        size = int(np.prod(shape)) if shape else 1
        return np.arange(start, start + size).reshape(shape)

    def has_block(self, name):
        return name in self._blocks

    def block_values(self, name, x):
        return np.asarray(x)[self.block(name)]

    def row_count(self, prefix):
        """Number of rows whose name starts with ``prefix``."""
        return sum(1 for r in self._row_names if r.startswith(prefix))

    def dense(self):
        """``(A, c, lower, upper, senses, rhs)`` with a dense ``A``."""
        self.seal()
        return self.A.toarray(), self.c, self.lower, self.upper, self.senses, self.rhs


def constraint_violation(lp, x):
    """Largest absolute violation of any row or bound at ``x``."""
    lp.seal()
    x = np.asarray(x, dtype=float)
    worst = 0.0
    if lp.n_vars:
        worst = max(worst, float(np.max(np.maximum(lp.lower - x, 0.0), initial=0.0)),
                    float(np.max(np.maximum(x - lp.upper, 0.0), initial=0.0)))
    if lp.n_rows:
        ax = lp.A @ x
        senses = np.array(lp.senses)
        r = ax - lp.rhs
        viol = np.where(senses == "<=", np.maximum(r, 0.0),
                        np.where(senses == ">=", np.maximum(-r, 0.0), np.abs(r)))
        worst = max(worst, float(viol.max()))
    return worst


@dataclass
class SolveReport:
    status: str
    objective_value: float
    x: np.ndarray
    iterations: int
    max_constraint_violation: float
    variable_names: tuple = field(default=(), repr=False)
    backend: str = "simplex"
    message: str = ""

    @property
    def optimal(self):
        return self.status == "optimal"

    @property
    def primal_values(self):
        return dict(zip(self.variable_names, self.x.tolist()))
