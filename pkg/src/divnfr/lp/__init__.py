"""Linear-program container, solvers, oracle and MPS export."""

from .highs import solve_highs
from .model import (FEAS_TOL, OPT_TOL, LinearProgram, SolveReport,
                    constraint_violation)
from .mps import mps_column_names, read_mps, write_mps
from .oracle import vertex_oracle
from .simplex import solve as solve_simplex

BACKENDS = {"simplex": solve_simplex, "highs": solve_highs}


def solve(lp, tol=OPT_TOL, max_iter=50_000, backend="simplex"):
    """Solve with the named backend (``"simplex"`` or ``"highs"``)."""
    try:
        fn = BACKENDS[backend]
    except KeyError:
        from ..errors import ConfigError
        raise ConfigError(f"unknown LP backend {backend!r}") from None
    return fn(lp, tol=tol, max_iter=max_iter)


__all__ = [
    "BACKENDS", "FEAS_TOL", "OPT_TOL", "LinearProgram", "SolveReport",
    "constraint_violation", "mps_column_names", "read_mps", "solve",
    "solve_highs", "solve_simplex", "vertex_oracle", "write_mps",
]
