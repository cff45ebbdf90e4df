"""Nonlinear perturbation dynamics around the shear.

    d_t omega + (U + u1) d_x omega + u2 d_y omega - U'' d_x phi = nu Delta omega

All products are pseudo-spectral on the padded grid, so the discrete transport
u . grad omega is orthogonal to omega up to roundoff.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from couette_lab.core.exceptions import CflViolationError
from couette_lab.modules.dynamics.integrator import integrating_factor_rk4
from couette_lab.modules.dynamics.linear import CFL_SLACK
from couette_lab.modules.dynamics.state import DynamicsOptions, NonlinearState
from couette_lab.modules.shear.profile import ShearProfile, heat_step
from couette_lab.modules.spectral.fields import Basis, SpectralField
from couette_lab.modules.spectral.grid import ChannelGrid
from couette_lab.modules.spectral.poisson import (
    biot_savart,
    derivative_y,
    gradient_norm_sq,
    poisson_solve_field,
)
from couette_lab.modules.spectral.transforms import from_physical, to_physical

logger = logging.getLogger(__name__)


def _dx(field: SpectralField) -> SpectralField:
    k = field.grid.wavenumbers[:, None]
    return SpectralField(field.grid, 1j * k * field.coeffs, field.basis)


def diffusion_symbol(grid: ChannelGrid, nu: float) -> np.ndarray:
    """-nu (k^2 + (n pi/2)^2) for every stored coefficient."""
    k = grid.wavenumbers.astype(float)[:, None]
    return -nu * (k**2 + grid.mu[None, :])


def advection(omega: SpectralField) -> SpectralField:
    """u . grad omega projected onto the retained modes."""
    u1, u2 = biot_savart(omega)
    physical = to_physical(u1) * to_physical(_dx(omega)) + to_physical(u2) * to_physical(derivative_y(omega))
    return from_physical(physical, omega.grid)


def explicit_terms(omega: SpectralField, profile: ShearProfile, options: DynamicsOptions) -> SpectralField:
    """Everything but the diffusion, evaluated in one pass through physical space."""
    grid = omega.grid
    dx_omega = to_physical(_dx(omega))
    total = np.zeros_like(dx_omega)

    if options.transport:
        u_pad, u2_pad = profile.padded()
        dx_phi = to_physical(_dx(poisson_solve_field(omega)))
        total += -u_pad[None, :] * dx_omega + u2_pad[None, :] * dx_phi

    if options.nonlinear:
        u1, u2 = biot_savart(omega)
        total -= to_physical(u1) * dx_omega + to_physical(u2) * to_physical(derivative_y(omega))

    return from_physical(total, grid)


def nonlinear_rhs(state: NonlinearState, options: Optional[DynamicsOptions] = None) -> SpectralField:
    """d_t omega for every retained wavenumber, diffusion included.

    The k = 0 row receives the feedback of the nonzero modes through the
    nonlinear products.
    """
    options = options or DynamicsOptions()
    explicit = explicit_terms(state.omega, state.profile, options)
    diffusion = diffusion_symbol(state.omega.grid, state.nu) * state.omega.coeffs
    return SpectralField(state.omega.grid, explicit.coeffs + diffusion, Basis.SINE)


def nonlinear_cfl_limit(state: NonlinearState, cfl: float = 0.5, options: Optional[DynamicsOptions] = None) -> float:
    """cfl * min(dx / max|U + u1|, h / max|u2|) on the padded grid."""
    options = options or DynamicsOptions()
    grid = state.omega.grid
    horizontal = np.zeros((grid.padded_x, grid.padded_y - 1))
    vertical = 0.0
    if options.transport:
        u_pad, _ = state.profile.padded()
        horizontal = horizontal + u_pad[None, :]
    if options.nonlinear:
        u1, u2 = biot_savart(state.omega)
        horizontal = horizontal + to_physical(u1)
        vertical = float(np.max(np.abs(to_physical(u2))))

    limits = []
    speed_x = float(np.max(np.abs(horizontal)))
    if speed_x > 0:
        limits.append(grid.dx / speed_x)
    if vertical > 0:
        limits.append(grid.h / vertical)
    return cfl * min(limits) if limits else float("inf")


def step_nonlinear(state: NonlinearState, dt: float, options: Optional[DynamicsOptions] = None) -> NonlinearState:
    """Advance the full field by one IFRK4 step and re-impose reality.

    Raises:
        CflViolationError: When dt exceeds the advective limit
    """
    options = options or DynamicsOptions()
    if dt == 0:
        return state

    dt_max = nonlinear_cfl_limit(state, options.cfl, options)
    if dt > dt_max * (1.0 + CFL_SLACK):
        raise CflViolationError(dt, dt_max, context=f"nonlinear t={state.t:.4g}")

    grid = state.omega.grid
    start = state.profile
    t0 = state.t
    profiles = {}

    def profile_at(t: float) -> ShearProfile:
        if t not in profiles:
            profiles[t] = heat_step(start, t - t0)
        return profiles[t]

    def explicit(coeffs: np.ndarray, t: float) -> np.ndarray:
        return explicit_terms(SpectralField(grid, coeffs, Basis.SINE), profile_at(t), options).coeffs

    lam = diffusion_symbol(grid, state.nu)
    coeffs = integrating_factor_rk4(state.omega.coeffs, t0, dt, lam, explicit)
    omega = SpectralField(grid, coeffs, Basis.SINE).enforce_reality()
    return state.evolve(omega, t0 + dt, profile_at(t0 + dt))


def _inner_re(a: SpectralField, b: SpectralField) -> float:
    return float(np.sum(np.real(np.conj(b.coeffs) * a.coeffs)))


def transport_flux(state: NonlinearState) -> float:
    """Re sum_k <(u . grad omega)_k, omega_k>; zero up to roundoff."""
    return _inner_re(advection(state.omega), state.omega)


def shear_coupling(state: NonlinearState) -> float:
    """Re <U'' d_x phi, omega>, the only production term of the enstrophy."""
    grid = state.omega.grid
    _, u2_pad = state.profile.padded()
    dx_phi = to_physical(_dx(poisson_solve_field(state.omega)))
    return _inner_re(from_physical(u2_pad[None, :] * dx_phi, grid), state.omega)


def enstrophy_dissipation(omega: SpectralField) -> float:
    """nu-free part of the dissipation: ||grad omega||^2."""
    return float(sum(gradient_norm_sq(omega.coeffs[i], int(k)) for i, k in enumerate(omega.grid.wavenumbers)))


def enstrophy_budget_residual(
    trajectory: Sequence[NonlinearState], options: Optional[DynamicsOptions] = None
) -> np.ndarray:
    """d/dt 1/2||omega||^2 + nu ||grad omega||^2 - Re<U'' d_x phi, omega> per sample.

    The time derivative uses second-order finite differences over the sample
    times, so the residual measures time-discretisation error only.

    Args:
        trajectory: States in time order (at least three)
        options: transport=False drops the shear coupling

    Returns:
        Residual per sample
    """
    options = options or DynamicsOptions()
    if len(trajectory) < 3:
        raise ValueError("enstrophy_budget_residual needs at least three states")
    times = np.array([s.t for s in trajectory])
    half = np.array([0.5 * s.omega.norm_sq() for s in trajectory])
    derivative = np.gradient(half, times, edge_order=2)
    dissipation = np.array([s.nu * enstrophy_dissipation(s.omega) for s in trajectory])
    production = np.array([shear_coupling(s) if options.transport else 0.0 for s in trajectory])
    return derivative + dissipation - production


def velocity_damping_integrand(state: NonlinearState, ledger=None) -> float:
    """sum_{k != 0} e^{2 delta* nu^{1/3} t} |k|^{2(m+1-delta)} ||grad_k phi_k||^2.

    Args:
        state: Nonlinear state
        ledger: Object with delta_star, m and delta (defaults to state.ledger)
    """
    ledger = ledger if ledger is not None else state.ledger
    if ledger is None:
        raise ValueError("velocity_damping_integrand needs an energy ledger")
    phi = poisson_solve_field(state.omega)
    weight = np.exp(2.0 * ledger.delta_star * state.nu ** (1.0 / 3.0) * state.t)
    total = 0.0
    for i, k in enumerate(phi.grid.wavenumbers):
        if k == 0:
            continue
        total += abs(int(k)) ** (2.0 * (ledger.m + 1.0 - ledger.delta)) * gradient_norm_sq(phi.coeffs[i], int(k))
    return float(weight * total)
