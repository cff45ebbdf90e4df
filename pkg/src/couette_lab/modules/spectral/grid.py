"""Channel grid on T x [-1, 1]."""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from couette_lab.core.exceptions import GridError


@dataclass(frozen=True)
class ChannelGrid:
    """Discretisation of the periodic channel.

    x is Fourier with wavenumbers k = -n_x..n_x; y uses the sine basis
    sin(n pi (y+1)/2), n = 1..n_y, collocated at y_j = -1 + 2j/(n_y+1).

    Products are formed on a padded grid: M_x points in x and P intervals in y,
    sized so that quadratic products survive truncation without aliasing at
    the default dealias fraction 2/3.
    """

    n_x: int
    n_y: int
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if self.n_y < 8:
            raise GridError(f"n_y must be >= 8, got {self.n_y}")
        if self.n_x < 1:
            raise GridError(f"n_x must be >= 1, got {self.n_x}")
        if not (0.0 < self.dealias_fraction <= 1.0):
            raise GridError(f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction}")

    @property
    def h(self) -> float:
        return 2.0 / (self.n_y + 1)

    @cached_property
    def y_nodes(self) -> np.ndarray:
        j = np.arange(1, self.n_y + 1)
        return -1.0 + j * self.h

    @cached_property
    def closed_y_nodes(self) -> np.ndarray:
        """Nodes including the walls y = -1 and y = 1."""
        j = np.arange(0, self.n_y + 2)
        return -1.0 + j * self.h

    @cached_property
    def mode_numbers(self) -> np.ndarray:
        return np.arange(1, self.n_y + 1)

    @cached_property
    def half_wavenumbers(self) -> np.ndarray:
        """n pi / 2, the y-wavenumber of sine/cosine mode n."""
        return self.mode_numbers * (np.pi / 2.0)

    @cached_property
    def mu(self) -> np.ndarray:
        """Eigenvalues (n pi / 2)^2 of -d_yy on the sine basis."""
        return self.half_wavenumbers**2

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.n_x, self.n_x + 1)

    def row(self, k: int) -> int:
        """Row index of wavenumber k in a coefficient array."""
        if abs(k) > self.n_x:
            raise GridError(f"wavenumber {k} outside retained range |k| <= {self.n_x}")
        return k + self.n_x

    @property
    def padded_x(self) -> int:
        return math.ceil((2 * self.n_x + 1) / self.dealias_fraction)

    @property
    def padded_y(self) -> int:
        """Number of y intervals P of the padded grid (P - 1 interior nodes)."""
        return max(math.ceil((self.n_y + 1) / self.dealias_fraction), self.n_y + 1)

    @cached_property
    def padded_y_nodes(self) -> np.ndarray:
        p = self.padded_y
        return -1.0 + 2.0 * np.arange(1, p) / p

    @property
    def padded_h(self) -> float:
        return 2.0 / self.padded_y

    @property
    def dx(self) -> float:
        """Physical x spacing on the padded grid."""
        return 2.0 * np.pi / self.padded_x

    def __repr__(self) -> str:
        return (
            f"ChannelGrid(n_x={self.n_x}, n_y={self.n_y}, dealias={self.dealias_fraction:.4g}, "
            f"padded={self.padded_x}x{self.padded_y - 1})"
        )
