"""Unit tests for differentiation, the Delta_k inverse and Biot-Savart."""

import numpy as np
import pytest

from couette_lab.modules.spectral import (
    Basis,
    SpectralField,
    biot_savart,
    collocation_inner,
    derivative_y,
    gradient_norm_sq,
    inner_product,
    laplacian_matrix,
    poisson_solve,
    to_physical,
)
from couette_lab.modules.spectral.transforms import (
    evaluate_cosine_series,
    evaluate_sine_series,
    inverse_sine_transform,
)


def _gauss(n: int = 200):
    return np.polynomial.legendre.leggauss(n)


class TestPoissonSolve:
    """Test the diagonal solve of Delta_k phi = omega."""

    def test_laplacian_residual(self, grid, smooth_coeffs):
        """Test that the node-space Laplacian reproduces omega."""
        omega = smooth_coeffs(grid.n_y)
        k = 3

        phi = poisson_solve(omega, k)
        residual = laplacian_matrix(k, grid.n_y) @ inverse_sine_transform(phi) - inverse_sine_transform(omega)

        assert np.max(np.abs(residual)) < 1e-10

    def test_mean_mode_allowed(self, grid, smooth_coeffs):
        """Test that k = 0 is a valid Dirichlet solve."""
        omega = smooth_coeffs(grid.n_y)

        phi = poisson_solve(omega, 0)

        np.testing.assert_allclose(-phi * grid.mu, omega, atol=1e-14)

    def test_derivative_switches_basis(self, grid, smooth_coeffs):
        """Test d_y on SINE gives COSINE and back, with the right values."""
        field = SpectralField.zeros(grid).with_mode(1, smooth_coeffs(grid.n_y))

        first = derivative_y(field)
        second = derivative_y(first)

        assert first.basis == Basis.COSINE
        assert second.basis == Basis.SINE
        np.testing.assert_allclose(second.coeffs, -grid.mu * field.coeffs, atol=1e-12)

    def test_gradient_norm(self, grid, smooth_coeffs):
        """Test ||grad_k f||^2 against the quadrature of |d_y f|^2 + k^2 |f|^2."""
        coeffs = smooth_coeffs(grid.n_y)
        k = 2
        t, w = _gauss()
        f = evaluate_sine_series(coeffs, t)
        df = evaluate_cosine_series(coeffs * grid.half_wavenumbers, t)

        expected = np.sum(w * (k * k * np.abs(f) ** 2 + np.abs(df) ** 2))

        assert gradient_norm_sq(coeffs, k) == pytest.approx(expected, rel=1e-10)


class TestBiotSavart:
    """Test the velocity recovered from the vorticity."""

    def test_divergence_free_and_wall_condition(self, grid, smooth_coeffs):
        """Test d_x u1 + d_y u2 = 0 and u2(+-1) = 0."""
        field = SpectralField.zeros(grid)
        for k in (1, 2, 3):
            field = field.with_mode(k, smooth_coeffs(grid.n_y))

        u1, u2 = biot_savart(field)
        kx = grid.wavenumbers[:, None]
        divergence = 1j * kx * u1.coeffs
        dy_u2 = derivative_y(u2)

        assert u1.basis == Basis.COSINE
        assert u2.basis == Basis.SINE
        np.testing.assert_allclose(divergence + dy_u2.coeffs, 0.0, atol=1e-12)

    def test_velocity_is_real(self, grid, smooth_coeffs):
        """Test that a real vorticity gives a real velocity."""
        field = SpectralField.zeros(grid).with_mode(2, smooth_coeffs(grid.n_y))

        u1, u2 = biot_savart(field)

        assert u1.reality_defect() < 1e-14
        assert u2.reality_defect() < 1e-14
        assert np.isrealobj(to_physical(u2))


class TestInnerProducts:
    """Test the exact mixed-basis inner product."""

    def test_mixed_basis_against_quadrature(self, grid, smooth_coeffs):
        """Test <sine series, cosine series> against Gauss-Legendre."""
        a = smooth_coeffs(grid.n_y)
        b = smooth_coeffs(grid.n_y)
        t, w = _gauss(400)
        fa = evaluate_sine_series(a, t)
        fb = evaluate_cosine_series(b, t)

        expected = np.sum(w * fa * np.conj(fb))

        assert abs(inner_product(a, Basis.SINE, b, Basis.COSINE) - expected) < 1e-10
        assert abs(inner_product(b, Basis.COSINE, a, Basis.SINE) - np.conj(expected)) < 1e-10

    def test_same_basis_is_coefficient_product(self, smooth_coeffs):
        """Test that orthonormality reduces same-basis products to vdot."""
        a = smooth_coeffs(16)
        b = smooth_coeffs(16)

        assert inner_product(a, Basis.SINE, b, Basis.SINE) == pytest.approx(np.vdot(b, a))

    def test_collocation_inner_matches_coefficients(self, grid, smooth_coeffs):
        """Test that the h-weighted node sum is exact for sine series."""
        a = smooth_coeffs(grid.n_y)
        b = smooth_coeffs(grid.n_y)

        value = collocation_inner(inverse_sine_transform(a), inverse_sine_transform(b), grid.h)

        assert value == pytest.approx(np.vdot(b, a), rel=1e-12)
