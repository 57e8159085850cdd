"""Piecewise-linear cuts for ``g(x) = x ln x`` on [0, 1].

Tangent families under-estimate ``g``: the LP row ``a x + b <= d`` then
lets ``-d`` claim slightly more entropy than the demand really has.
Secant families (chords between consecutive grid points) over-estimate
``g`` on [0, 1], which makes the entropy floor conservative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

CUT_FAMILIES = ("tangent_linear", "tangent_exponential", "secant")
DEFAULT_STEP = 0.1


def xlogx(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, x * np.log(safe), 0.0)


@dataclass(frozen=True)
class CutFamily:
    mode: str
    M: int
    slopes: np.ndarray
    intercepts: np.ndarray
    points: np.ndarray  # sample points (tangent) or left chord ends (secant)

    @property
    def lines(self):
        return list(zip(self.slopes.tolist(), self.intercepts.tolist()))

    def envelope(self, x):
        """Pointwise maximum of the lines at ``x``."""
        x = np.asarray(x, dtype=float)
        return np.max(np.multiply.outer(x, self.slopes) + self.intercepts, axis=-1)


def make_cuts(mode, M, step=DEFAULT_STEP):
    """Build ``M`` lines of the given family.

    ``tangent_linear`` touches ``g`` at ``x_m = m / M`` (m = 1..M), giving
    slope ``1 + ln x_m`` and intercept ``-x_m``.  ``tangent_exponential``
    touches at ``exp(-(m - 1) step)``.  ``secant`` joins consecutive points
    of the grid ``0, 1/M, ..., 1``.
    """
    if M < 1:
        raise ConfigError(f"need at least one cut, got M={M}")
    m = np.arange(1, M + 1, dtype=float)
    if mode in ("tangent", "tangent_linear"):
        x = m / M
        return CutFamily("tangent_linear", M, 1.0 + np.log(x), -x, x)
    if mode == "tangent_exponential":
        if step <= 0:
            raise ConfigError("exponential sampling needs a positive step")
        t = (m - 1.0) * step
        return CutFamily("tangent_exponential", M, 1.0 - t, -np.exp(-t), np.exp(-t))
    if mode == "secant":
        grid = np.arange(M + 1, dtype=float) / M
        gv = xlogx(grid)
        slopes = np.diff(gv) / np.diff(grid)
        intercepts = gv[:-1] - slopes * grid[:-1]
        return CutFamily("secant", M, slopes, intercepts, grid[:-1])
    raise ConfigError(f"unknown cut family {mode!r}; expected one of {CUT_FAMILIES}")


def kl_log_cuts(M, step=DEFAULT_STEP):
    """Tangents of ``ln p`` at ``p = exp(-(m - 1) step)``.

    Returns ``(slopes, intercepts)`` with ``ln p <= slope * p + intercept``:
    slope ``exp((m - 1) step)`` and intercept ``-(m - 1) step - 1``.
    """
    if M < 1 or step <= 0:
        raise ConfigError("KL cuts need M >= 1 and a positive step")
    t = np.arange(M, dtype=float) * step
    return np.exp(t), -t - 1.0
