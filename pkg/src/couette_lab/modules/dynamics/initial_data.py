"""Initial vorticity perturbations normalised to the anisotropic size epsilon.

    eps = sqrt(sum_k (1+k^2)^m ||omega_k||^2)
        + nu^{1/3} sqrt(sum_k (1+k^2)^{m-1/3} ||d_y omega_k||^2)
"""

import logging
from typing import Literal

import numpy as np

from couette_lab.core.exceptions import GridError
from couette_lab.modules.spectral.fields import SpectralField
from couette_lab.modules.spectral.grid import ChannelGrid

logger = logging.getLogger(__name__)

Preset = Literal["single_mode", "random_band", "zero"]


def anisotropic_norm(field: SpectralField, nu: float, m: float) -> float:
    """The epsilon-size of a vorticity field (k = 0 row included)."""
    k = field.grid.wavenumbers.astype(float)
    weight = 1.0 + k**2
    plain = field.mode_norms_sq()
    gradient = np.sum(field.grid.mu[None, :] * np.abs(field.coeffs) ** 2, axis=1)
    first = np.sqrt(np.sum(weight**m * plain))
    second = nu ** (1.0 / 3.0) * np.sqrt(np.sum(weight ** (m - 1.0 / 3.0) * gradient))
    return float(first + second)


def mode_anisotropic_norm(omega_k: np.ndarray, k: int, grid: ChannelGrid, nu: float, m: float) -> float:
    """Single-mode version of anisotropic_norm."""
    weight = 1.0 + float(k) ** 2
    plain = float(np.sum(np.abs(omega_k) ** 2))
    gradient = float(np.sum(grid.mu * np.abs(omega_k) ** 2))
    return float(np.sqrt(weight**m * plain) + nu ** (1.0 / 3.0) * np.sqrt(weight ** (m - 1.0 / 3.0) * gradient))


def _random_profile(rng: np.random.Generator, n_max: int, n_y: int) -> np.ndarray:
    profile = np.zeros(n_y, dtype=complex)
    n = np.arange(1, n_max + 1)
    profile[:n_max] = (rng.standard_normal(n_max) + 1j * rng.standard_normal(n_max)) / n
    return profile


def initial_mode(
    grid: ChannelGrid,
    k: int,
    preset: Preset,
    epsilon: float,
    nu: float,
    m: float,
    n: int = 1,
    n_max: int = 8,
    seed: int = 0,
) -> np.ndarray:
    """Sine coefficients of omega_k(0) for a linear single-mode run.

    The mode is scaled so that its own anisotropic norm equals epsilon.
    """
    if preset == "zero":
        return np.zeros(grid.n_y, dtype=complex)
    if preset == "single_mode":
        if not (1 <= n <= grid.n_y):
            raise GridError(f"y-mode {n} outside 1..{grid.n_y}")
        vector = np.zeros(grid.n_y, dtype=complex)
        vector[n - 1] = 1.0
    elif preset == "random_band":
        rng = np.random.default_rng([seed, abs(int(k))])
        vector = _random_profile(rng, min(n_max, grid.n_y), grid.n_y)
    else:
        raise ValueError(f"unknown perturbation preset '{preset}'")
    return vector * (epsilon / mode_anisotropic_norm(vector, k, grid, nu, m))


def make_initial_vorticity(
    grid: ChannelGrid,
    preset: Preset,
    epsilon: float,
    nu: float,
    m: float,
    k: int = 1,
    n: int = 1,
    k_max: int = 4,
    n_max: int = 8,
    seed: int = 0,
) -> SpectralField:
    """Real initial field for nonlinear runs.

    Args:
        grid: Channel grid
        preset: "single_mode" (wavenumber k, y-mode n), "random_band"
            (1 <= |k| <= k_max, n <= n_max, seeded) or "zero"
        epsilon: Target anisotropic norm
        nu: Viscosity entering the norm
        m: x-regularity exponent
        seed: Seed for random_band

    Returns:
        SpectralField with anisotropic_norm == epsilon (zero for "zero")
    """
    field = SpectralField.zeros(grid)
    if preset == "zero":
        return field

    if preset == "single_mode":
        if not (1 <= n <= grid.n_y):
            raise GridError(f"y-mode {n} outside 1..{grid.n_y}")
        vector = np.zeros(grid.n_y, dtype=complex)
        vector[n - 1] = 1.0
        field = field.with_mode(k, vector)
    elif preset == "random_band":
        if k_max > grid.n_x:
            raise GridError(f"k_max={k_max} exceeds retained n_x={grid.n_x}")
        rng = np.random.default_rng(seed)
        for wavenumber in range(1, k_max + 1):
            field = field.with_mode(wavenumber, _random_profile(rng, min(n_max, grid.n_y), grid.n_y))
    else:
        raise ValueError(f"unknown perturbation preset '{preset}'")

    size = anisotropic_norm(field, nu, m)
    logger.debug(f"initial data '{preset}' scaled from size {size:.3e} to {epsilon:.3e}")
    return field.scaled(epsilon / size)
