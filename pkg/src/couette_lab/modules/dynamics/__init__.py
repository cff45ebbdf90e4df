"""Linear and nonlinear vorticity dynamics around the time-dependent shear."""
from couette_lab.modules.dynamics.initial_data import (
    anisotropic_norm,
    initial_mode,
    make_initial_vorticity,
    mode_anisotropic_norm,
)
from couette_lab.modules.dynamics.integrator import integrating_factor_rk4
from couette_lab.modules.dynamics.linear import linear_cfl_limit, linear_rhs, step_linear
from couette_lab.modules.dynamics.nonlinear import (
    enstrophy_budget_residual,
    nonlinear_cfl_limit,
    nonlinear_rhs,
    shear_coupling,
    step_nonlinear,
    transport_flux,
    velocity_damping_integrand,
)
from couette_lab.modules.dynamics.state import DynamicsOptions, LinearModeState, NonlinearState

__all__ = [
    "DynamicsOptions",
    "LinearModeState",
    "NonlinearState",
    "anisotropic_norm",
    "enstrophy_budget_residual",
    "initial_mode",
    "integrating_factor_rk4",
    "linear_cfl_limit",
    "linear_rhs",
    "make_initial_vorticity",
    "mode_anisotropic_norm",
    "nonlinear_cfl_limit",
    "nonlinear_rhs",
    "shear_coupling",
    "step_linear",
    "step_nonlinear",
    "transport_flux",
    "velocity_damping_integrand",
]
