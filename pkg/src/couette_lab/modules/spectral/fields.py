"""Spectral fields: per-wavenumber y-coefficients with a representation tag."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from couette_lab.core.exceptions import GridError
from couette_lab.modules.spectral.grid import ChannelGrid


class Basis(str, Enum):
    """Representation of the y-dependence.

    SINE fields vanish at y = +-1; d_y maps SINE to COSINE and back.
    """

    SINE = "sine"
    COSINE = "cosine"


@dataclass(frozen=True)
class SpectralField:
    """Coefficients of a field on T x [-1, 1].

    coeffs has shape (2 n_x + 1, n_y); row k + n_x holds the y-coefficients of
    the x-wavenumber k. Fields are treated as immutable: operations return new
    instances.
    """

    grid: ChannelGrid
    coeffs: np.ndarray
    basis: Basis = Basis.SINE

    def __post_init__(self):
        expected = (2 * self.grid.n_x + 1, self.grid.n_y)
        if np.shape(self.coeffs) != expected:
            raise GridError(f"coefficient array has shape {np.shape(self.coeffs)}, expected {expected}")
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))

    @classmethod
    def zeros(cls, grid: ChannelGrid, basis: Basis = Basis.SINE) -> "SpectralField":
        return cls(grid, np.zeros((2 * grid.n_x + 1, grid.n_y), dtype=complex), basis)

    def mode(self, k: int) -> np.ndarray:
        """Copy of the coefficient vector of wavenumber k."""
        return self.coeffs[self.grid.row(k)].copy()

    def with_mode(self, k: int, vector: np.ndarray) -> "SpectralField":
        """New field with wavenumber k set and -k set to its conjugate."""
        coeffs = self.coeffs.copy()
        coeffs[self.grid.row(k)] = vector
        if k != 0:
            coeffs[self.grid.row(-k)] = np.conj(vector)
        else:
            coeffs[self.grid.row(0)] = np.real(vector)
        return SpectralField(self.grid, coeffs, self.basis)

    def enforce_reality(self) -> "SpectralField":
        """Project onto fields that represent real functions of (x, y)."""
        coeffs = self.coeffs.copy()
        k0 = self.grid.n_x
        positive = 0.5 * (coeffs[k0 + 1 :] + np.conj(coeffs[:k0][::-1]))
        coeffs[k0 + 1 :] = positive
        coeffs[:k0] = np.conj(positive[::-1])
        coeffs[k0] = coeffs[k0].real
        return SpectralField(self.grid, coeffs, self.basis)

    def reality_defect(self) -> float:
        """max |c_{-k} - conj(c_k)| over the stored rows."""
        flipped = np.conj(self.coeffs[::-1])
        return float(np.max(np.abs(self.coeffs - flipped)))

    def scaled(self, factor: complex) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * factor, self.basis)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        if other.basis != self.basis or other.grid != self.grid:
            raise GridError("cannot add fields with different grids or bases")
        return SpectralField(self.grid, self.coeffs + other.coeffs, self.basis)

    def mode_norms_sq(self) -> np.ndarray:
        """||f_k||^2 per row."""
        return np.sum(np.abs(self.coeffs) ** 2, axis=1)

    def norm_sq(self) -> float:
        """sum_k ||f_k||^2 (L2 over T with normalised measure)."""
        return float(np.sum(self.mode_norms_sq()))

    def values(self) -> np.ndarray:
        """Node values per row (interior nodes)."""
        from couette_lab.modules.spectral.transforms import field_values

        return field_values(self.coeffs, self.basis)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeffs)))

    def __repr__(self) -> str:
        return f"SpectralField(basis={self.basis.value}, shape={self.coeffs.shape}, norm={np.sqrt(self.norm_sq()):.3e})"
