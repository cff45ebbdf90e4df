"""Sine/cosine transforms in y and padded physical-space transforms.

Conventions (N = n_y):
    values  v_j = sum_n c_n sin(n pi j/(N+1))   = 0.5 * DST-I(c)
    coeffs  c_n = DST-I(v) / (N+1)
Cosine fields carry coefficients d_n, n = 1..N, and are evaluated on the
closed grid j = 0..N+1 by DCT-I. The sine and cosine modes are orthonormal on
[-1, 1], so coefficient inner products are exact L2 inner products.
"""

from typing import Callable, Optional

import numpy as np
from scipy import fft as sfft

from couette_lab.core.exceptions import GridError
from couette_lab.modules.spectral.fields import Basis, SpectralField
from couette_lab.modules.spectral.grid import ChannelGrid


def _r2r(transform: Callable, x: np.ndarray, **kwargs) -> np.ndarray:
    """Apply a real-to-real transform to real and imaginary parts separately."""
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return transform(x.real, **kwargs) + 1j * transform(x.imag, **kwargs)
    return transform(x.astype(float, copy=False), **kwargs)


def sine_transform(values: np.ndarray, grid: Optional[ChannelGrid] = None) -> np.ndarray:
    """Sine coefficients of values sampled on the interior y-nodes.

    Args:
        values: Array whose last axis holds the n_y node values
        grid: When given, the last axis must match grid.n_y

    Returns:
        Coefficient array of the same shape

    Raises:
        GridError: On length mismatch
    """
    values = np.asarray(values)
    if grid is not None and values.shape[-1] != grid.n_y:
        raise GridError(f"expected {grid.n_y} node values, got {values.shape[-1]}")
    n = values.shape[-1]
    return _r2r(sfft.dst, values, type=1, axis=-1) / (n + 1)


def inverse_sine_transform(coeffs: np.ndarray, grid: Optional[ChannelGrid] = None) -> np.ndarray:
    """Node values of a sine series (inverse of sine_transform)."""
    coeffs = np.asarray(coeffs)
    if grid is not None and coeffs.shape[-1] != grid.n_y:
        raise GridError(f"expected {grid.n_y} coefficients, got {coeffs.shape[-1]}")
    return 0.5 * _r2r(sfft.dst, coeffs, type=1, axis=-1)


def cosine_values(coeffs: np.ndarray, closed: bool = True) -> np.ndarray:
    """Values of a cosine series on the closed grid (walls included) or interior nodes."""
    coeffs = np.asarray(coeffs)
    n = coeffs.shape[-1]
    padded = np.zeros(coeffs.shape[:-1] + (n + 2,), dtype=np.result_type(coeffs, float))
    padded[..., 1 : n + 1] = coeffs
    values = 0.5 * _r2r(sfft.dct, padded, type=1, axis=-1)
    return values if closed else values[..., 1 : n + 1]


def cosine_transform(closed_values: np.ndarray) -> np.ndarray:
    """Cosine coefficients d_1..d_N from values on the closed grid (length N+2)."""
    closed_values = np.asarray(closed_values)
    n = closed_values.shape[-1] - 2
    full = _r2r(sfft.dct, closed_values, type=1, axis=-1) / (n + 1)
    return full[..., 1 : n + 1]


def field_values(coeffs: np.ndarray, basis: Basis) -> np.ndarray:
    """Values on the interior y-nodes for either representation."""
    if basis == Basis.SINE:
        return inverse_sine_transform(coeffs)
    return cosine_values(coeffs, closed=False)


def _resize(coeffs: np.ndarray, size: int) -> np.ndarray:
    n = coeffs.shape[-1]
    if n == size:
        return coeffs
    out = np.zeros(coeffs.shape[:-1] + (size,), dtype=coeffs.dtype)
    m = min(n, size)
    out[..., :m] = coeffs[..., :m]
    return out


def padded_values_y(coeffs: np.ndarray, basis: Basis, grid: ChannelGrid) -> np.ndarray:
    """Evaluate a y-series on the interior nodes of the padded y-grid."""
    coeffs = np.asarray(coeffs)
    padded = _resize(coeffs, grid.padded_y - 1)
    if basis == Basis.SINE:
        return 0.5 * _r2r(sfft.dst, padded, type=1, axis=-1)
    return cosine_values(padded, closed=False)


def project_padded_y(values: np.ndarray, grid: ChannelGrid) -> np.ndarray:
    """Sine coefficients (truncated to n_y) of an odd product sampled on the padded grid."""
    p = grid.padded_y
    coeffs = _r2r(sfft.dst, values, type=1, axis=-1) / p
    return coeffs[..., : grid.n_y]


def to_physical(field: SpectralField) -> np.ndarray:
    """Real values of a field on the padded (x, y) grid, shape (M_x, P - 1)."""
    grid = field.grid
    y_values = padded_values_y(field.coeffs, field.basis, grid)
    nonnegative = y_values[grid.n_x :]  # rows k = 0..K
    return sfft.irfft(nonnegative, n=grid.padded_x, axis=0) * grid.padded_x


def from_physical(values: np.ndarray, grid: ChannelGrid) -> SpectralField:
    """Project an odd-in-y physical product back onto the retained sine modes."""
    spectrum = sfft.rfft(values, axis=0) / grid.padded_x
    positive = project_padded_y(spectrum[: grid.n_x + 1], grid)
    coeffs = np.empty((2 * grid.n_x + 1, grid.n_y), dtype=complex)
    coeffs[grid.n_x :] = positive
    coeffs[: grid.n_x] = np.conj(positive[1:][::-1])
    coeffs[grid.n_x] = coeffs[grid.n_x].real
    return SpectralField(grid, coeffs, Basis.SINE)


def evaluate_sine_series(coeffs: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Direct evaluation of a sine series at arbitrary points (no FFT)."""
    n = np.arange(1, np.shape(coeffs)[-1] + 1)
    basis = np.sin(np.multiply.outer(np.asarray(y) + 1.0, n) * (np.pi / 2.0))
    return basis @ np.asarray(coeffs)


def evaluate_cosine_series(coeffs: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Direct evaluation of a cosine series (modes 1..N) at arbitrary points."""
    n = np.arange(1, np.shape(coeffs)[-1] + 1)
    basis = np.cos(np.multiply.outer(np.asarray(y) + 1.0, n) * (np.pi / 2.0))
    return basis @ np.asarray(coeffs)
