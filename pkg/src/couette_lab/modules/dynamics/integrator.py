"""Integrating-factor (Lawson) Runge-Kutta 4 for u' = lam * u + N(u, t).

The diagonal linear part is integrated exactly through exp(lam dt); only N is
treated explicitly, so the remaining step restriction is advective.
"""

from typing import Callable

import numpy as np

NonlinearTerm = Callable[[np.ndarray, float], np.ndarray]


def integrating_factor_rk4(u: np.ndarray, t: float, dt: float, lam: np.ndarray, nonlinear: NonlinearTerm) -> np.ndarray:
    """One IFRK4 step.

    Args:
        u: Current state (any shape broadcastable with lam)
        t: Current time
        dt: Step size (dt = 0 returns a copy)
        lam: Diagonal linear symbol
        nonlinear: Explicit term N(u, t)

    Returns:
        State at t + dt
    """
    if dt == 0:
        return np.array(u, copy=True)
    e = np.exp(lam * dt)
    e2 = np.exp(lam * (dt / 2.0))
    half = t + dt / 2.0

    a = nonlinear(u, t)
    b = nonlinear(e2 * (u + 0.5 * dt * a), half)
    c = nonlinear(e2 * u + 0.5 * dt * b, half)
    d = nonlinear(e * u + dt * e2 * c, t + dt)
    return e * u + (dt / 6.0) * (e * a + 2.0 * e2 * (b + c) + d)
