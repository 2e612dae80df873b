"""Closed-form minimisers of the quadratic subproblems. All elementwise.

Scalars broadcast; non-scalar arguments (penalties included) must share one shape.
"""

import numpy as np

from errors import InvalidArgumentError
from imaging.image import broadcast_operands


def _positive(name, value):
    if not np.all(np.asarray(value) > 0):
        raise InvalidArgumentError(f"{name} must be > 0, got {value}")


def update_Z(O, B_prev, T_prev, D_prev, gamma):
    """argmin_Z ½(O − (T∘Z + D))² + (γ/2)(Z − B_prev)²."""
    _positive("gamma", gamma)
    O, B_prev, T, D, gamma = broadcast_operands("update_Z", O, B_prev, T_prev, D_prev, gamma)
    return (T * O + gamma * B_prev - T * D) / (gamma + T * T)


def update_P(O_ref, B_ref, T_prev, Q_prev, alpha):
    """argmin_P ½(O_ref − (P∘B_ref + Q))² + (α/2)(P − T_prev)²."""
    _positive("alpha", alpha)
    O_ref, B_ref, T, Q, alpha = broadcast_operands("update_P", O_ref, B_ref, T_prev, Q_prev, alpha)
    return (O_ref * B_ref + alpha * T - Q * B_ref) / (B_ref * B_ref + alpha)


def update_Q(O_ref, B_ref, P_prev, D_prev, beta):
    """argmin_Q ½(O_ref − (P∘B_ref + Q))² + (β/2)(Q − D_prev)²."""
    _positive("beta", beta)
    O_ref, B_ref, P, D, beta = broadcast_operands("update_Q", O_ref, B_ref, P_prev, D_prev, beta)
    return (O_ref + beta * D - P * B_ref) / (beta + 1.0)
