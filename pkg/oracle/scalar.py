"""Golden-section minimisation and the per-pixel subproblem objectives it checks.

Objectives are evaluated in exact rational arithmetic: comparing two float
evaluations of a flat quadratic near its minimum is only reliable to about
sqrt(machine epsilon), far too coarse for 1e-8 agreement.
"""

from __future__ import annotations

import math
from fractions import Fraction

from errors import InvalidArgumentError, OracleError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
BRACKET = (-2.0, 3.0)
PIXEL_TOL = 1e-11
MAX_ITER = 200

HALF = Fraction(1, 2)


def numeric_argmin_scalar(objective, lo: float, hi: float, tol: float = 1e-9, max_iter: int = MAX_ITER) -> float:
    """Golden-section search for the minimiser of a unimodal objective on [lo, hi]."""
    if not lo < hi:
        raise InvalidArgumentError(f"empty bracket [{lo}, {hi}]")
    if not tol > 0:
        raise InvalidArgumentError(f"tol must be > 0, got {tol}")
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = objective(c), objective(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = objective(d)
    return 0.5 * (a + b)


def _exact(*values):
    return [Fraction(float(v)) for v in values]


def z_objective(O, B_prev, T, D, gamma):
    """½(O − (T·z + D))² + (γ/2)(z − B_prev)², exactly."""
    O, B_prev, T, D, gamma = _exact(O, B_prev, T, D, gamma)

    def f(z):
        z = Fraction(z)
        r = O - (T * z + D)
        return HALF * r * r + HALF * gamma * (z - B_prev) ** 2

    return f


def p_objective(O_ref, B_ref, T_prev, Q_prev, alpha):
    """½(O_ref − (p·B_ref + Q))² + (α/2)(p − T_prev)², exactly."""
    O_ref, B_ref, T_prev, Q_prev, alpha = _exact(O_ref, B_ref, T_prev, Q_prev, alpha)

    def f(p):
        p = Fraction(p)
        r = O_ref - (p * B_ref + Q_prev)
        return HALF * r * r + HALF * alpha * (p - T_prev) ** 2

    return f


def q_objective(O_ref, B_ref, P_prev, D_prev, beta):
    """½(O_ref − (P·B_ref + q))² + (β/2)(q − D_prev)², exactly."""
    O_ref, B_ref, P_prev, D_prev, beta = _exact(O_ref, B_ref, P_prev, D_prev, beta)

    def f(q):
        q = Fraction(q)
        r = O_ref - (P_prev * B_ref + q)
        return HALF * r * r + HALF * beta * (q - D_prev) ** 2

    return f


def argmin_pixel(objective, tol: float = PIXEL_TOL) -> float:
    """Minimiser over the fixed bracket; a boundary hit means the bracket was wrong."""
    lo, hi = BRACKET
    x = numeric_argmin_scalar(objective, lo, hi, tol)
    if x - lo <= 10 * tol or hi - x <= 10 * tol:
        raise OracleError(f"minimiser {x} on the bracket boundary [{lo}, {hi}]")
    return x
