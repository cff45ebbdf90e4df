"""Unit tests for the full nonlinear perturbation dynamics."""

import numpy as np
import pytest

from couette_lab.core.exceptions import CflViolationError
from couette_lab.modules.dynamics import (
    DynamicsOptions,
    LinearModeState,
    NonlinearState,
    enstrophy_budget_residual,
    linear_rhs,
    make_initial_vorticity,
    nonlinear_rhs,
    step_nonlinear,
    transport_flux,
    velocity_damping_integrand,
)
from couette_lab.modules.dynamics.nonlinear import enstrophy_dissipation
from couette_lab.modules.energy import EnergyLedger
from couette_lab.modules.shear import ShearProfile, load_shear_coeffs

NU = 1e-2


def _state(grid, epsilon=0.1, seed=1, profile=None):
    omega = make_initial_vorticity(grid, "random_band", epsilon, NU, 0.75, k_max=2, n_max=4, seed=seed)
    profile = profile or ShearProfile.couette(grid, nu=NU)
    return NonlinearState(omega, profile, 0.0, NU)


def _curved_profile(grid):
    return ShearProfile.from_coeffs(grid, load_shear_coeffs(grid, "single_mode 1 0.05"), NU)


def _evolve(state, dt, n_steps, options=None):
    for _ in range(n_steps):
        state = step_nonlinear(state, dt, options)
    return state


class TestNonlinearRhs:
    """Test the assembled right-hand side."""

    def test_linear_limit_matches_mode_solver(self, grid):
        """Test that nonlinear=False reproduces the single-mode right-hand side row by row."""
        state = _state(grid, profile=_curved_profile(grid))

        rhs = nonlinear_rhs(state, DynamicsOptions(nonlinear=False))

        for k in range(1, grid.n_x + 1):
            mode = LinearModeState(k, state.omega.mode(k), 0.0, NU, state.profile)
            np.testing.assert_allclose(rhs.mode(k), linear_rhs(mode), atol=1e-12)

    def test_transport_flux_vanishes(self, grid):
        """Test Re <u . grad omega, omega> = 0 to roundoff."""
        assert abs(transport_flux(_state(grid))) < 1e-12

    def test_mean_row_fed_by_nonlinearity(self, grid):
        """Test that the k = 0 row is driven only when the nonlinearity is on."""
        state = _state(grid)

        linear = nonlinear_rhs(state, DynamicsOptions(nonlinear=False))
        full = nonlinear_rhs(state)

        assert np.max(np.abs(linear.mode(0))) < 1e-14
        assert np.max(np.abs(full.mode(0))) > 1e-6


class TestStepNonlinear:
    """Test stepping of the full field."""

    def test_reality_preserved(self, grid):
        """Test that the stepped field is still real."""
        later = _evolve(_state(grid), 0.05, 3)

        assert later.omega.reality_defect() < 1e-15
        assert later.t == pytest.approx(0.15)

    def test_zero_dt_is_identity(self, grid):
        state = _state(grid)

        assert step_nonlinear(state, 0.0) is state

    def test_cfl_violation(self, grid):
        """Test CflViolationError for an oversized step."""
        with pytest.raises(CflViolationError):
            step_nonlinear(_state(grid), 10.0)

    def test_deviation_from_linear_is_quadratic(self, grid):
        """Test that doubling epsilon quadruples the nonlinear correction."""
        deviations = []
        for epsilon in (1e-2, 2e-2):
            start = _state(grid, epsilon=epsilon)
            full = _evolve(start, 0.05, 2).omega
            linear = _evolve(start, 0.05, 2, DynamicsOptions(nonlinear=False)).omega
            deviations.append(np.sqrt((full + linear.scaled(-1.0)).norm_sq()))

        assert 3.0 < deviations[1] / deviations[0] < 5.0


class TestDiagnostics:
    """Test enstrophy budget and velocity damping diagnostics."""

    def test_enstrophy_budget_closes(self, grid):
        """Test d/dt 1/2||omega||^2 + nu||grad omega||^2 - production ~ 0 on a curved shear."""
        state = _state(grid, profile=_curved_profile(grid))
        trajectory = [state]
        for _ in range(6):
            trajectory.append(step_nonlinear(trajectory[-1], 0.02))

        residual = enstrophy_budget_residual(trajectory)
        dissipation = max(s.nu * enstrophy_dissipation(s.omega) for s in trajectory)

        assert np.max(np.abs(residual)) < 1e-2 * dissipation

    def test_budget_needs_three_states(self, grid):
        with pytest.raises(ValueError):
            enstrophy_budget_residual([_state(grid), _state(grid)])

    def test_velocity_damping_integrand(self, grid):
        """Test a positive integrand with a ledger and ValueError without one."""
        state = _state(grid)
        ledger = EnergyLedger.from_k0(64.0, NU)

        assert velocity_damping_integrand(state, ledger) > 0.0
        with pytest.raises(ValueError):
            velocity_damping_integrand(state)
