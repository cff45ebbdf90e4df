"""Green's function of Delta_k = -k^2 + d_yy with Dirichlet data on [-1, 1].

    G_k(y, y') = -sinh(k(1 - y>)) sinh(k(1 + y<)) / (k sinh 2k)

For |k| above SCALED_THRESHOLD the sinh products overflow, so the kernel is
evaluated in the scaled form
    -exp(-|k||y - y'|) (1 - e^{-2p})(1 - e^{-2q}) / (2|k| (1 - e^{-4|k|}))
with p = |k|(1 - y>), q = |k|(1 + y<).
"""

from functools import lru_cache
from typing import Literal, NamedTuple

import numpy as np

from couette_lab.core.exceptions import WavenumberError
from couette_lab.modules.spectral.grid import ChannelGrid
from couette_lab.modules.spectral.transforms import evaluate_sine_series, inverse_sine_transform

SCALED_THRESHOLD = 30.0


def _check_k(k: float) -> float:
    if k == 0:
        raise WavenumberError("the Green's function of Delta_k requires k != 0")
    return abs(float(k))


def _green_direct(a: float, y: np.ndarray, yp: np.ndarray) -> np.ndarray:
    upper = np.maximum(y, yp)
    lower = np.minimum(y, yp)
    return -np.sinh(a * (1.0 - upper)) * np.sinh(a * (1.0 + lower)) / (a * np.sinh(2.0 * a))


def _green_scaled(a: float, y: np.ndarray, yp: np.ndarray) -> np.ndarray:
    upper = np.maximum(y, yp)
    lower = np.minimum(y, yp)
    p = a * (1.0 - upper)
    q = a * (1.0 + lower)
    return (
        -np.exp(-a * (upper - lower))
        * (-np.expm1(-2.0 * p))
        * (-np.expm1(-2.0 * q))
        / (2.0 * a * (-np.expm1(-4.0 * a)))
    )


def green_function(k: float, y, yp) -> np.ndarray:
    """G_k(y, y'), vectorised over broadcastable y and y'.

    Raises:
        WavenumberError: For k = 0
    """
    a = _check_k(k)
    y = np.asarray(y, dtype=float)
    yp = np.asarray(yp, dtype=float)
    if a <= SCALED_THRESHOLD:
        return _green_direct(a, y, yp)
    return _green_scaled(a, y, yp)


def green_dy(k: float, y, yp) -> np.ndarray:
    """d/dy G_k(y, y') (jump of size 1 across y = y'); scaled form, overflow free."""
    a = _check_k(k)
    y = np.asarray(y, dtype=float)
    yp = np.asarray(yp, dtype=float)
    denom = 2.0 * (-np.expm1(-4.0 * a))
    below = y <= yp
    decay = np.exp(-a * np.abs(y - yp))
    # y <= y': -sinh(a(1-y')) cosh(a(1+y)) / sinh 2a
    left = -decay * (-np.expm1(-2.0 * a * (1.0 - yp))) * (1.0 + np.exp(-2.0 * a * (1.0 + y))) / denom
    # y >= y': cosh(a(1-y)) sinh(a(1+y')) / sinh 2a
    right = decay * (1.0 + np.exp(-2.0 * a * (1.0 - y))) * (-np.expm1(-2.0 * a * (1.0 + yp))) / denom
    return np.where(below, left, right)


def green_diagonal_slope(k: float, y) -> np.ndarray:
    """d/dy of G_k(y, y) = sinh(2ky)/sinh(2k) (even in k)."""
    a = _check_k(k)
    y = np.asarray(y, dtype=float)
    s = np.abs(y)
    return np.sign(y) * np.exp(2.0 * a * (s - 1.0)) * (-np.expm1(-4.0 * a * s)) / (-np.expm1(-4.0 * a))


def commutator_kernel(k: float, y, yp) -> np.ndarray:
    """H_k(y, y') = -sinh(k(y + y'))/sinh(2k), bounded by 1 on the square."""
    a = _check_k(k)
    s = np.asarray(y, dtype=float) + np.asarray(yp, dtype=float)
    t = np.abs(s)
    return -np.sign(s) * np.exp(a * (t - 2.0)) * (-np.expm1(-2.0 * a * t)) / (-np.expm1(-4.0 * a))


class GreenQuadrature(NamedTuple):
    points: np.ndarray
    weights: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray


@lru_cache(maxsize=8)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def green_solve(
    omega_k: np.ndarray,
    k: float,
    grid: ChannelGrid,
    rule: Literal["trapezoid"] = "trapezoid",
) -> np.ndarray:
    """phi_k(y_j) = int G_k(y_j, y') omega_k(y') dy' by the trapezoid rule on the y-nodes.

    The kink of G_k sits on a node, so the rule is second order.

    Returns:
        Values of phi_k on the interior nodes
    """
    if rule != "trapezoid":
        raise ValueError(f"unknown quadrature rule '{rule}'")
    y = grid.y_nodes
    kernel = green_function(k, y[:, None], y[None, :])
    return grid.h * (kernel @ inverse_sine_transform(omega_k))


def green_solve_gauss(omega_k: np.ndarray, k: float, n_quad: int = 96) -> GreenQuadrature:
    """Spectrally accurate Green route: Gauss-Legendre on each side of the kink.

    Evaluates phi_k and d_y phi_k at n_quad outer Gauss points; the inner
    integral over y' is split at y' = y so both pieces are smooth.

    Args:
        omega_k: Sine coefficients of omega_k
        k: Nonzero wavenumber
        n_quad: Gauss points per integral

    Returns:
        GreenQuadrature with outer points/weights and phi, d_y phi there
    """
    _check_k(k)
    t, w = _gauss_legendre(n_quad)
    y = t
    # inner nodes on [-1, y] and [y, 1]
    left = -1.0 + (y[:, None] + 1.0) * (t[None, :] + 1.0) / 2.0
    left_w = (y[:, None] + 1.0) / 2.0 * w[None, :]
    right = y[:, None] + (1.0 - y[:, None]) * (t[None, :] + 1.0) / 2.0
    right_w = (1.0 - y[:, None]) / 2.0 * w[None, :]

    omega_left = evaluate_sine_series(omega_k, left)
    omega_right = evaluate_sine_series(omega_k, right)
    yy = y[:, None]

    phi = np.sum(left_w * green_function(k, yy, left) * omega_left, axis=1) + np.sum(
        right_w * green_function(k, yy, right) * omega_right, axis=1
    )
    # y' < y on the left piece, y' > y on the right piece
    dphi = np.sum(left_w * green_dy(k, yy, left) * omega_left, axis=1) + np.sum(
        right_w * green_dy(k, yy, right) * omega_right, axis=1
    )
    return GreenQuadrature(points=y, weights=w, phi=phi, dphi=dphi)
