"""Unit tests for E_k, D_k and the weighted aggregates."""

import numpy as np
import pytest

from couette_lab.core.exceptions import GridError, OperatorCacheMiss, WavenumberError
from couette_lab.modules.energy import (
    ENERGY_COLUMNS,
    PER_K_COLUMNS,
    EnergyLedger,
    aggregate,
    coercivity_bounds,
    dissipation_k,
    dissipation_tau_by_green,
    energy_k,
    mode_energy,
)
from couette_lab.modules.sio import assemble_sio, operator_norm
from couette_lab.modules.spectral import ChannelGrid


@pytest.fixture
def ledger():
    """Deliberately large weights so every term of E_k matters."""
    return EnergyLedger(c_alpha=0.5, c_beta=0.1, c_tau=0.1, delta_star=1e-3, delta0=1e-3, nu=1e-2)


class TestEnergyK:
    """Test the five-term energy of one mode."""

    def test_missing_operator(self, grid, ledger, smooth_coeffs):
        """Test OperatorCacheMiss when J_k was not supplied."""
        with pytest.raises(OperatorCacheMiss):
            energy_k(smooth_coeffs(grid.n_y), 2, ledger, {})

    def test_resolution_mismatch(self, grid, ledger, smooth_coeffs):
        """Test GridError when J_k acts on another number of nodes."""
        ops = {2: assemble_sio(2, ChannelGrid(1, 16))}

        with pytest.raises(GridError):
            energy_k(smooth_coeffs(grid.n_y), 2, ledger, ops)

    def test_mean_mode_rejected(self, grid, ledger, smooth_coeffs):
        with pytest.raises(WavenumberError):
            energy_k(smooth_coeffs(grid.n_y), 0, ledger, {})

    def test_zero_weights_give_plain_norm(self, grid, smooth_coeffs):
        """Test E_k = ||omega||^2 when all ledger weights vanish."""
        ledger = EnergyLedger(c_alpha=0.0, c_beta=0.0, c_tau=0.0, delta_star=1e-3, delta0=1e-3, nu=1e-2)
        omega = smooth_coeffs(grid.n_y)

        value = energy_k(omega, 1, ledger, {1: assemble_sio(1, grid)})

        assert value == pytest.approx(float(np.sum(np.abs(omega) ** 2)), rel=1e-14)

    @pytest.mark.parametrize("k", [1, 3, -2])
    def test_coercivity_bounds(self, grid, ledger, smooth_coeffs, k):
        """Test lower <= E_k <= upper with ||J_k|| from the assembled matrix."""
        op = assemble_sio(k, grid)
        omega = smooth_coeffs(grid.n_y)

        value = energy_k(omega, k, ledger, {k: op})
        lower, upper = coercivity_bounds(omega, k, ledger, operator_norm(op.matrix))

        assert 0.0 < lower <= value <= upper


class TestDissipationK:
    """Test the five dissipation terms."""

    def test_single_mode_closed_forms(self, grid, ledger):
        """Test each term for omega = e_n."""
        k, n = 2, 3
        omega = np.zeros(grid.n_y, dtype=complex)
        omega[n - 1] = 1.0
        symbol = k * k + grid.mu[n - 1]

        terms = dissipation_k(omega, k, ledger)

        assert terms.gamma == pytest.approx(ledger.nu * symbol)
        assert terms.beta == pytest.approx(ledger.nu ** (1.0 / 3.0) * k ** (2.0 / 3.0))
        assert terms.tau == pytest.approx(k**2 / symbol)
        assert terms.alpha == pytest.approx(ledger.nu ** (5.0 / 3.0) * k ** (-2.0 / 3.0) * symbol * grid.mu[n - 1])
        expected_total = (
            terms.gamma
            + ledger.c_alpha * terms.alpha
            + ledger.c_beta * terms.beta
            + ledger.c_tau * terms.tau
            + ledger.c_tau * ledger.c_alpha * terms.tau_alpha
        )
        assert terms.total == pytest.approx(expected_total)

    def test_damping_exponent_on_tau(self, grid, smooth_coeffs):
        """Test the |k|^{2-delta} weight of D_tau."""
        omega = smooth_coeffs(grid.n_y)
        plain = EnergyLedger.from_k0(64.0, 1e-2)
        damped = EnergyLedger.from_k0(64.0, 1e-2, delta=0.5)

        ratio = dissipation_k(omega, 4, damped).tau / dissipation_k(omega, 4, plain).tau

        assert ratio == pytest.approx(4.0**-0.5)

    @pytest.mark.parametrize("k", [1, 5])
    def test_green_route_matches_spectral(self, grid, ledger, smooth_coeffs, k):
        """Test D_tau by Gauss-Legendre quadrature of the Green solve."""
        omega = smooth_coeffs(grid.n_y)

        assert dissipation_tau_by_green(omega, k, ledger) == pytest.approx(dissipation_k(omega, k, ledger).tau, rel=1e-8)


class TestAggregate:
    """Test the weighted totals over modes."""

    def test_totals(self, grid, ledger, smooth_coeffs):
        """Test E = E0 + Eneq and the |k|^{2m} weights at t = 0."""
        ops = {k: assemble_sio(k, grid) for k in (1, 2)}
        modes = [mode_energy(smooth_coeffs(grid.n_y), k, 0.0, ledger, ops) for k in (1, 2)]
        omega_0 = smooth_coeffs(grid.n_y).real

        snapshot = aggregate(modes, omega_0, ledger, 0.0)

        assert snapshot.E == pytest.approx(snapshot.E0 + snapshot.Eneq)
        assert snapshot.D == pytest.approx(snapshot.D0 + snapshot.Dneq + snapshot.DE)
        assert snapshot.Eneq == pytest.approx(modes[0].energy + 2.0 ** (2 * ledger.m) * modes[1].energy)
        assert snapshot.E0 > 0.0
        assert list(snapshot.to_row()) == ENERGY_COLUMNS
        assert [list(row) for row in snapshot.per_k_rows()] == [PER_K_COLUMNS, PER_K_COLUMNS]

    def test_linear_runs_have_no_mean_energy(self, grid, ledger, smooth_coeffs):
        ops = {1: assemble_sio(1, grid)}
        modes = [mode_energy(smooth_coeffs(grid.n_y), 1, 0.5, ledger, ops)]

        snapshot = aggregate(modes, np.zeros(grid.n_y), ledger, 0.5)

        assert snapshot.E0 == 0.0
        assert snapshot.D0 == 0.0

    def test_mismatched_samples_rejected(self, grid, ledger, smooth_coeffs):
        """Test ValueError for a mode sampled at another time or viscosity."""
        ops = {1: assemble_sio(1, grid)}
        mode = mode_energy(smooth_coeffs(grid.n_y), 1, 0.5, ledger, ops)
        other_nu = ledger.model_copy(update={"nu": 2e-2})

        with pytest.raises(ValueError):
            aggregate([mode], np.zeros(grid.n_y), ledger, 0.6)
        with pytest.raises(ValueError):
            aggregate([mode], np.zeros(grid.n_y), other_nu, 0.5)
