"""Unit tests for the operator audit helpers."""

import numpy as np
import pytest

from couette_lab.core.exceptions import WavenumberError
from couette_lab.modules.sio import (
    AUDIT_COLUMNS,
    assemble_sio,
    audit_operators,
    coercivity_min_eig,
    excised_sio_value,
    operator_norm,
    richardson_limit,
    self_adjoint_residual,
)
from couette_lab.modules.spectral import ChannelGrid


class TestNorms:
    """Test weighted norms and the self-adjointness residual."""

    def test_identity_and_diagonal(self):
        """Test the norm of simple matrices."""
        assert operator_norm(np.eye(5)) == pytest.approx(1.0)
        assert operator_norm(np.diag([3.0, 1.0, 0.5])) == pytest.approx(3.0)

    def test_uniform_weights_do_not_change_norm(self, rng):
        """Test that a constant weight cancels in the similarity transform."""
        matrix = rng.standard_normal((6, 6))

        assert operator_norm(matrix, np.full(6, 0.1)) == pytest.approx(operator_norm(matrix), rel=1e-12)

    def test_non_square_rejected(self):
        """Test ValueError for a rectangular matrix."""
        with pytest.raises(ValueError):
            operator_norm(np.zeros((3, 4)))

    def test_self_adjoint_residual(self):
        """Test zero for Hermitian input and a positive value otherwise."""
        hermitian = np.array([[1.0, 2.0j], [-2.0j, 3.0]])
        skew = np.array([[0.0, 1.0], [0.0, 0.0]])

        assert self_adjoint_residual(hermitian) == pytest.approx(0.0, abs=1e-15)
        assert self_adjoint_residual(skew) > 0.5
        assert self_adjoint_residual(np.zeros((3, 3))) == 0.0


class TestCoercivity:
    """Test the lower bound of 1 + c_tau J_k."""

    @pytest.mark.parametrize("c_tau", [0.05, 0.2])
    def test_min_eig_above_norm_bound(self, c_tau):
        """Test lambda_min >= 1 - c_tau ||J_k|| > 0."""
        op = assemble_sio(2, ChannelGrid(1, 48))

        smallest = coercivity_min_eig(op, c_tau)

        assert smallest >= 1.0 - c_tau * operator_norm(op.matrix) - 1e-12
        assert smallest > 0.0


class TestRichardson:
    """Test the extrapolation used by the excision oracle."""

    def test_quadratic_is_exact(self):
        """Test that three samples recover a quadratic at eps = 0."""
        eps = np.array([1e-1, 5e-2, 2e-2])
        values = 1.0 + 2.0 * eps + 3.0 * eps**2

        assert richardson_limit(eps, values) == pytest.approx(1.0, abs=1e-12)

    def test_needs_two_matching_samples(self):
        """Test ValueError for too few or mismatched samples."""
        with pytest.raises(ValueError):
            richardson_limit([1e-2], [1.0])
        with pytest.raises(ValueError):
            richardson_limit([1e-2, 1e-3], [1.0])

    def test_excised_value_is_odd_in_k(self):
        """Test that the excised integral flips sign with k."""
        plus = excised_sio_value(2, 0.1, np.cos, 1e-2)
        minus = excised_sio_value(-2, 0.1, np.cos, 1e-2)

        assert minus == pytest.approx(-plus, rel=1e-12)
        with pytest.raises(WavenumberError):
            excised_sio_value(0, 0.1, np.cos, 1e-2)


class TestAuditOperators:
    """Test the audit table."""

    def test_rows_and_columns(self):
        """Test one row per k with the CSV columns and sane values."""
        grid = ChannelGrid(1, 32)

        rows = audit_operators(grid, [1, 2, 3], c_tau=0.01)

        assert [row.k for row in rows] == [1, 2, 3]
        for row in rows:
            record = row.to_dict()
            assert list(record) == AUDIT_COLUMNS
            assert row.selfadj_residual < 1e-13
            assert row.coercivity_min_eig > 0.0
            assert row.kh == pytest.approx(row.k * grid.h)
            assert row.n_y == 32

    def test_providers_are_used(self):
        """Test that injected providers replace direct assembly."""
        grid = ChannelGrid(1, 16)
        calls = []

        def provider(k):
            calls.append(k)
            return assemble_sio(k, grid)

        audit_operators(grid, [2, 4], c_tau=0.01, sio_provider=provider)

        assert calls == [2, 4]

    def test_graded_and_nodal_commutator_columns(self):
        """Test that norm_H_over_k comes from the graded grid and the nodal value is kept."""
        grid = ChannelGrid(1, 127)

        low, high = audit_operators(grid, [1, 32], c_tau=0.01)

        assert low.norm_H_over_k == pytest.approx(low.norm_H_over_k_nodal, rel=0.1)
        assert high.norm_H_over_k == pytest.approx(np.pi / 2.0, rel=0.05)
        assert high.norm_H_over_k_nodal < 0.5 * high.norm_H_over_k
