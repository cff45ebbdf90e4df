"""Differentiation, the Delta_k inverse and Biot-Savart on the sine basis."""

from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import fft as sfft

from couette_lab.modules.spectral.fields import Basis, SpectralField


def half_wavenumbers(n_y: int) -> np.ndarray:
    return np.arange(1, n_y + 1) * (np.pi / 2.0)


def derivative_coeffs(coeffs: np.ndarray, basis: Basis) -> Tuple[np.ndarray, Basis]:
    """d/dy on coefficient arrays; returns the new coefficients and tag."""
    coeffs = np.asarray(coeffs)
    lam = half_wavenumbers(coeffs.shape[-1])
    if basis == Basis.SINE:
        return coeffs * lam, Basis.COSINE
    return -coeffs * lam, Basis.SINE


def derivative_y(field: SpectralField) -> SpectralField:
    """d/dy of a field. SINE maps to COSINE and COSINE maps to SINE."""
    coeffs, basis = derivative_coeffs(field.coeffs, field.basis)
    return SpectralField(field.grid, coeffs, basis)


def poisson_solve(omega_k: np.ndarray, k: int) -> np.ndarray:
    """Solve Delta_k phi = omega with phi(+-1) = 0.

    Delta_k = -k^2 + d_yy is diagonal on the sine basis, so the solve is the
    division phi_n = -omega_n / (k^2 + (n pi/2)^2). k = 0 is allowed.

    Args:
        omega_k: Sine coefficients (last axis n_y)
        k: x-wavenumber

    Returns:
        Sine coefficients of phi_k
    """
    omega_k = np.asarray(omega_k)
    symbol = k * k + half_wavenumbers(omega_k.shape[-1]) ** 2
    return -omega_k / symbol


def poisson_solve_field(omega: SpectralField) -> SpectralField:
    """poisson_solve applied to every retained wavenumber."""
    grid = omega.grid
    k = grid.wavenumbers.astype(float)[:, None]
    symbol = k**2 + grid.mu[None, :]
    return SpectralField(grid, -omega.coeffs / symbol, Basis.SINE)


@lru_cache(maxsize=32)
def _sine_matrices(n_y: int) -> Tuple[np.ndarray, np.ndarray]:
    eye = np.eye(n_y)
    forward = sfft.dst(eye, type=1, axis=0) / (n_y + 1)
    inverse = 0.5 * sfft.dst(eye, type=1, axis=0)
    return forward, inverse


def laplacian_matrix(k: int, n_y: int) -> np.ndarray:
    """Dense Delta_k acting on node values (Dirichlet), spectral accuracy."""
    forward, inverse = _sine_matrices(n_y)
    symbol = -(k * k + half_wavenumbers(n_y) ** 2)
    return inverse @ (symbol[:, None] * forward)


def biot_savart(omega: SpectralField) -> Tuple[SpectralField, SpectralField]:
    """Velocity u = grad^perp Delta^{-1} omega = (d_y phi, -d_x phi).

    Returns:
        (u1, u2): u1 = d_y phi (COSINE), u2 = -ik phi (SINE), so u2(+-1) = 0
    """
    phi = poisson_solve_field(omega)
    u1 = derivative_y(phi)
    k = omega.grid.wavenumbers[:, None]
    u2 = SpectralField(omega.grid, -1j * k * phi.coeffs, Basis.SINE)
    return u1, u2


def gradient_norm_sq(coeffs: np.ndarray, k: int) -> float:
    """||grad_k f||^2 = sum (k^2 + (n pi/2)^2)|f_n|^2 for a sine series."""
    coeffs = np.asarray(coeffs)
    symbol = k * k + half_wavenumbers(coeffs.shape[-1]) ** 2
    return float(np.sum(symbol * np.abs(coeffs) ** 2))


@lru_cache(maxsize=32)
def _sine_cosine_gram(n_y: int) -> np.ndarray:
    """G[n, m] = int sin_n cos_m dy, nonzero only for n + m odd."""
    n = np.arange(1, n_y + 1)[:, None].astype(float)
    m = np.arange(1, n_y + 1)[None, :].astype(float)
    odd = (n + m) % 2 == 1
    denom = np.where(odd, n * n - m * m, 1.0)
    return np.where(odd, (4.0 / np.pi) * n / denom, 0.0)


def inner_product(a: np.ndarray, a_basis: Basis, b: np.ndarray, b_basis: Basis) -> complex:
    """Exact L2 inner product <a, b> = int a conj(b) dy of two y-series.

    Same-basis products are coefficient dot products; mixed SINE/COSINE
    products go through the closed-form Gram matrix.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a_basis == b_basis:
        return complex(np.vdot(b, a))
    if a_basis == Basis.SINE:
        return complex(np.conj(b) @ (_sine_cosine_gram(a.shape[-1]).T @ a))
    return complex(np.conj(b) @ (_sine_cosine_gram(a.shape[-1]) @ a))


def collocation_inner(f: np.ndarray, g: np.ndarray, h: float) -> complex:
    """h-weighted inner product of node values, sum h f conj(g)."""
    return complex(h * np.vdot(g, f))
