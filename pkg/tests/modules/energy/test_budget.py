"""Unit tests for the linear budget and the nonlinear bootstrap checks."""

import numpy as np
import pytest

from couette_lab.core.exceptions import SamplingError
from couette_lab.modules.dynamics import LinearModeState, initial_mode, step_linear
from couette_lab.modules.energy import (
    EnergyLedger,
    EnergySnapshot,
    mode_energy,
    verify_linear_budget,
    verify_nonlinear_bootstrap,
)
from couette_lab.modules.shear import ShearProfile
from couette_lab.modules.sio import assemble_sio

NU = 1e-3


def _couette_trajectory(grid, ledger, k=1, dt=0.1, n_steps=20):
    ops = {k: assemble_sio(k, grid)}
    omega = initial_mode(grid, k, "random_band", 1e-3, NU, ledger.m, n_max=6, seed=3)
    state = LinearModeState(k, omega, 0.0, NU, ShearProfile.couette(grid, nu=NU))
    samples = [mode_energy(state.omega_k, k, state.t, ledger, ops)]
    for _ in range(n_steps):
        state = step_linear(state, dt)
        samples.append(mode_energy(state.omega_k, k, state.t, ledger, ops))
    return samples


def _snapshots(times, energy, dissipation):
    return [
        EnergySnapshot(t=t, E0=0.0, Eneq=e, E=e, D0=0.0, Dneq=d, DE=0.0, D=d)
        for t, e, d in zip(times, energy, dissipation)
    ]


class TestLinearBudget:
    """Test the per-mode differential inequality along a trajectory."""

    def test_couette_holds_for_small_delta_star(self, grid):
        """Test a passing verdict around Couette flow."""
        ledger = EnergyLedger.from_k0(64.0, NU, delta_star=1e-4)

        report = verify_linear_budget(_couette_trajectory(grid, ledger), ledger, dt=0.1)

        assert report.passed
        assert report.violations == []
        assert report.integrated_passed
        assert report.empirical_delta_star > 1e-4
        assert report.n_samples == 21
        assert report.to_dict()["passed"] is True

    def test_failing_ledger_fails_report(self, grid):
        """Test that a broken ledger fails the report even without violations."""
        ledger = EnergyLedger.from_k0(64.0, NU, delta_star=1e-4, c_tau=0.9)

        report = verify_linear_budget(_couette_trajectory(grid, ledger, n_steps=4), ledger, dt=0.1)

        assert not report.ledger_audit.passed
        assert not report.passed

    def test_large_c_tau_and_delta_star_produce_violations(self, grid):
        """Test that the differential check itself flags samples when 8 delta* D_k outruns the decay."""
        ledger = EnergyLedger.from_k0(64.0, NU, delta_star=1.0, c_tau=0.9)

        report = verify_linear_budget(_couette_trajectory(grid, ledger, n_steps=10), ledger, dt=0.1)

        assert report.violations == list(range(1, 10))
        assert all(margin < 0 for margin in report.margins[1:-1])
        assert report.empirical_delta_star < 1.0
        assert not report.passed
        assert report.to_dict()["violations"] == report.violations

    def test_too_few_samples(self, grid):
        ledger = EnergyLedger.from_k0(64.0, NU)

        with pytest.raises(SamplingError):
            verify_linear_budget(_couette_trajectory(grid, ledger, n_steps=1), ledger, dt=0.1)

    def test_wrong_spacing(self, grid):
        """Test SamplingError when dt does not match the samples."""
        ledger = EnergyLedger.from_k0(64.0, NU)

        with pytest.raises(SamplingError):
            verify_linear_budget(_couette_trajectory(grid, ledger, n_steps=4), ledger, dt=0.2)

    def test_mixed_wavenumbers(self, grid):
        """Test SamplingError for a trajectory that mixes k."""
        ledger = EnergyLedger.from_k0(64.0, NU)
        samples = _couette_trajectory(grid, ledger, n_steps=4)
        samples[2].k = 2

        with pytest.raises(SamplingError):
            verify_linear_budget(samples, ledger, dt=0.1)


class TestNonlinearBootstrap:
    """Test the aggregate bootstrap checks on synthetic series."""

    def test_decaying_energy_passes(self):
        """Test E = exp(-t), D = 1 with small delta*."""
        ledger = EnergyLedger.from_k0(64.0, NU, delta_star=1e-3)
        times = np.linspace(0.0, 2.0, 21)

        report = verify_nonlinear_bootstrap(_snapshots(times, np.exp(-times), np.ones_like(times)), ledger, dt=0.1)

        assert report.finite
        assert report.passed
        assert report.fitted_C0 == 0.0
        assert report.smallness_passed
        assert report.E_initial == pytest.approx(1.0)

    def test_growth_fails_monotone(self):
        """Test that a growing energy fails the monotone check and smallness, so the integrated check is skipped."""
        ledger = EnergyLedger.from_k0(64.0, NU, delta_star=1e-3)
        times = np.linspace(0.0, 1.0, 11)

        report = verify_nonlinear_bootstrap(_snapshots(times, np.exp(times), np.ones_like(times)), ledger, dt=0.1)

        assert not report.monotone_passed
        assert not report.smallness_passed
        assert report.integrated_passed is None
        assert not report.passed
        assert report.fitted_C0 > 0.0
        assert report.max_defect <= 1e-12

    def test_integrated_check_needs_smallness(self):
        """Test that a large initial energy skips the integrated bound instead of failing it."""
        ledger = EnergyLedger.from_k0(64.0, NU, delta_star=1.0)
        times = np.linspace(0.0, 2.0, 21)

        report = verify_nonlinear_bootstrap(_snapshots(times, np.exp(-times), np.ones_like(times)), ledger, dt=0.1)

        assert report.fitted_C0 > 0.0
        assert not report.smallness_passed
        assert report.integrated_sup > report.E_initial
        assert report.integrated_passed is None
        assert report.monotone_passed
        assert report.passed
        assert report.to_dict()["integrated_passed"] is None

    def test_integrated_check_runs_under_smallness(self):
        """Test that the integrated bound is evaluated when the smallness condition holds."""
        ledger = EnergyLedger.from_k0(64.0, NU, delta_star=1e-3)
        times = np.linspace(0.0, 2.0, 21)

        report = verify_nonlinear_bootstrap(_snapshots(times, np.exp(-times), np.ones_like(times)), ledger, dt=0.1)

        assert report.smallness_passed
        assert report.integrated_passed is True

    def test_non_finite_data(self):
        """Test a failing report instead of an exception for NaN energies."""
        ledger = EnergyLedger.from_k0(64.0, NU)
        times = np.linspace(0.0, 0.4, 5)
        energy = np.array([1.0, 0.9, np.nan, 0.7, 0.6])

        report = verify_nonlinear_bootstrap(_snapshots(times, energy, np.ones_like(times)), ledger, dt=0.1)

        assert not report.finite
        assert not report.passed

    def test_too_few_samples(self):
        ledger = EnergyLedger.from_k0(64.0, NU)

        with pytest.raises(SamplingError):
            verify_nonlinear_bootstrap(_snapshots([0.0, 0.1], [1.0, 0.9], [1.0, 1.0]), ledger, dt=0.1)
