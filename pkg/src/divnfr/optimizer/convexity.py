"""Numeric check that the relative-entropy term stays convex after the
flow substitution ``f = r p``."""

from __future__ import annotations

import math
from fractions import Fraction

from ..errors import DomainError


def relative_entropy_hessian_minors(f, z):
    """Leading minors ``(h11, h22, det)`` of the Hessian of ``f ln(f / z)``.

    The Hessian is ``[[1/f, -1/z], [-1/z, f/z**2]]``.  Both diagonal
    entries are positive and the determinant vanishes identically, so the
    matrix is positive semidefinite.  The determinant is evaluated in exact
    rational arithmetic on the float inputs; done in floating point the
    cancellation error grows like ``1/z**2``.
    """
    f = float(f)
    z = float(z)
    if not (f > 0.0 and z > 0.0 and math.isfinite(f) and math.isfinite(z)):
        raise DomainError("Hessian minors need strictly positive, finite f and z")
    fq, zq = Fraction(f), Fraction(z)
    h11 = 1 / fq
    h22 = fq / (zq * zq)
    h12 = -1 / zq
    det = h11 * h22 - h12 * h12
    return float(h11), float(h22), float(det)


def relative_entropy_hessian(f, z):
    """Floating-point Hessian, for eigenvalue checks."""
    return [[1.0 / f, -1.0 / z], [-1.0 / z, f / (z * z)]]
