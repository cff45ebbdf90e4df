"""Linearised vorticity equation for one x-mode around the shear U.

    d_t omega_k = -ik U omega_k + ik U'' phi_k + nu Delta_k omega_k
"""

import logging
from typing import Optional

import numpy as np

from couette_lab.core.exceptions import CflViolationError
from couette_lab.modules.dynamics.integrator import integrating_factor_rk4
from couette_lab.modules.dynamics.state import DynamicsOptions, LinearModeState
from couette_lab.modules.shear.profile import ShearProfile, heat_step
from couette_lab.modules.spectral.fields import Basis
from couette_lab.modules.spectral.poisson import poisson_solve
from couette_lab.modules.spectral.transforms import padded_values_y, project_padded_y

logger = logging.getLogger(__name__)

# Relative slack on the CFL comparison so that dt == dt_max passes
CFL_SLACK = 1e-12


def diffusion_symbol(k: int, profile: ShearProfile) -> np.ndarray:
    """Eigenvalues -nu (k^2 + (n pi/2)^2) of nu Delta_k on the sine basis."""
    return -profile.nu * (k * k + profile.grid.mu)


def transport_term(omega_k: np.ndarray, k: int, profile: ShearProfile) -> np.ndarray:
    """-ik P(U omega) + ik P(U'' phi) with products formed on the padded y-grid."""
    grid = profile.grid
    u_pad, u2_pad = profile.padded()
    phi_k = poisson_solve(omega_k, k)
    product = u_pad * padded_values_y(omega_k, Basis.SINE, grid) - u2_pad * padded_values_y(phi_k, Basis.SINE, grid)
    return -1j * k * project_padded_y(product, grid)


def linear_rhs(state: LinearModeState, options: Optional[DynamicsOptions] = None) -> np.ndarray:
    """Full right-hand side including diffusion.

    Args:
        state: Current mode state
        options: transport=False keeps only the diffusion

    Returns:
        Sine coefficients of d_t omega_k
    """
    options = options or DynamicsOptions()
    rhs = diffusion_symbol(state.k, state.profile) * state.omega_k
    if options.transport:
        rhs = rhs + transport_term(state.omega_k, state.k, state.profile)
    return rhs


def linear_cfl_limit(k: int, profile: ShearProfile, cfl: float = 0.5) -> float:
    """Largest admissible dt: cfl / (|k| max|U|)."""
    speed = abs(k) * profile.max_abs_u()
    return float("inf") if speed == 0 else cfl / speed


def step_linear(state: LinearModeState, dt: float, options: Optional[DynamicsOptions] = None) -> LinearModeState:
    """Advance one mode by an IFRK4 step.

    The heat semigroup is integrated exactly; the shear at stage times is
    obtained from the exact heat flow of W.

    Raises:
        CflViolationError: When dt exceeds the advective limit
    """
    options = options or DynamicsOptions()
    if dt == 0:
        return state

    if options.transport:
        dt_max = linear_cfl_limit(state.k, state.profile, options.cfl)
        if dt > dt_max * (1.0 + CFL_SLACK):
            raise CflViolationError(dt, dt_max, context=f"linear k={state.k}")

    start = state.profile
    t0 = state.t
    profiles = {}

    def profile_at(t: float) -> ShearProfile:
        if t not in profiles:
            profiles[t] = heat_step(start, t - t0)
        return profiles[t]

    def explicit(omega_k: np.ndarray, t: float) -> np.ndarray:
        if not options.transport:
            return np.zeros_like(omega_k)
        return transport_term(omega_k, state.k, profile_at(t))

    lam = diffusion_symbol(state.k, start)
    omega_next = integrating_factor_rk4(state.omega_k, t0, dt, lam, explicit)
    return state.evolve(omega_next, t0 + dt, profile_at(t0 + dt))
