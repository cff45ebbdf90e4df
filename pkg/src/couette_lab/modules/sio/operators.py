"""Dense realisations of the singular integral operator J_k and the commutator H_k.

    J_k[f](y) = |k|^{1-delta} sgn(k) p.v. int G_k(y, y') f(y') / (2i (y - y')) dy'
    H_k[f](y) = |k|^{1-delta} sgn(k) p.v. int H_k(y, y') f(y') / (2i (y - y')) dy'

with H_k(y, y') = -sinh(k(y + y'))/sinh(2k). With this prefactor the
commutator identity reads d_y J_k f - J_k d_y f + H_k f = 0.

Matrices act on collocation values at the interior y-nodes; the inner product
is the h-weighted sum over those nodes.
"""

from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np

from couette_lab.core.exceptions import WavenumberError
from couette_lab.modules.spectral.green import commutator_kernel, green_diagonal_slope, green_function
from couette_lab.modules.spectral.grid import ChannelGrid

Scheme = Literal["alternating", "subtracted"]

SCHEME_TAGS = {
    "alternating": "alternating-point p.v. rule (odd offsets, weight 2h)",
    "subtracted": "diagonal subtraction + exact log term, trapezoid, JHS diagonal limit",
    "graded": "y = tanh(s), alternating rule on a uniform s-grid",
}


@dataclass(frozen=True)
class SioOperator:
    """J_k for one wavenumber."""

    k: int
    matrix: np.ndarray
    quadrature_tag: str
    damping_delta: float
    h: float

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values

    @property
    def n_y(self) -> int:
        return self.matrix.shape[0]

    def quadratic_form(self, values: np.ndarray) -> complex:
        """<f, J_k f> in the h-weighted inner product."""
        return complex(self.h * np.vdot(values, self.matrix @ values))


@dataclass(frozen=True)
class CommutatorOperator:
    """H_k = [J_k, d_y] for one wavenumber."""

    k: int
    matrix: np.ndarray
    quadrature_tag: str
    h: float

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values


def sio_prefactor(k: int, delta: float = 0.0) -> float:
    """|k|^{1-delta} sgn(k)."""
    return float(np.sign(k) * abs(k) ** (1.0 - delta))


def _alternating_matrix(kernel: np.ndarray, y: np.ndarray, h: float) -> np.ndarray:
    """p.v. int K(y, y') f(y')/(y - y') dy' using only nodes at odd index offset.

    Every row sees a midpoint rule of spacing 2h whose cells meet at y_j, so
    the pole cancels symmetrically and the matrix of a symmetric kernel is
    exactly antisymmetric.
    """
    n = y.size
    idx = np.arange(n)
    odd = (idx[:, None] - idx[None, :]) % 2 == 1
    diff = y[:, None] - y[None, :]
    safe = np.where(odd, diff, 1.0)
    return np.where(odd, 2.0 * h * kernel / safe, 0.0)


def _subtracted_matrix(kernel: np.ndarray, diagonal_limit: np.ndarray, y: np.ndarray, h: float) -> np.ndarray:
    """p.v. integral by subtracting f(y)K(y,y) and adding its exact log integral.

    Args:
        kernel: K(y_j, y_l)
        diagonal_limit: lim_{y' -> y} [K(y, y') - K(y, y)]/(y - y') at the nodes
        y: Interior nodes
        h: Node spacing
    """
    n = y.size
    diag = np.diag(kernel).copy()
    diff = y[:, None] - y[None, :]
    off = ~np.eye(n, dtype=bool)
    safe = np.where(off, diff, 1.0)

    matrix = np.where(off, h * kernel / safe, 0.0)
    subtracted = -h * diag * np.sum(np.where(off, 1.0 / safe, 0.0), axis=1)
    walls = -0.5 * h * diag / (y + 1.0) + 0.5 * h * diag / (1.0 - y)
    log_term = diag * np.log((1.0 + y) / (1.0 - y))
    matrix[np.arange(n), np.arange(n)] = subtracted + walls + log_term + h * diagonal_limit

    # -f'(y) K(y, y) at the diagonal, f' by central differences (f = 0 at the walls)
    upper = np.arange(n - 1)
    matrix[upper, upper + 1] += -0.5 * diag[upper]
    matrix[upper + 1, upper] += 0.5 * diag[upper + 1]
    return matrix


def _pv_matrix(kernel: np.ndarray, diagonal_limit: np.ndarray, grid: ChannelGrid, scheme: Scheme) -> np.ndarray:
    if scheme == "alternating":
        return _alternating_matrix(kernel, grid.y_nodes, grid.h)
    if scheme == "subtracted":
        return _subtracted_matrix(kernel, diagonal_limit, grid.y_nodes, grid.h)
    raise ValueError(f"unknown p.v. scheme '{scheme}'")


def assemble_sio(k: int, grid: ChannelGrid, delta: float = 0.0, scheme: Scheme = "alternating") -> SioOperator:
    """Assemble J_k as a dense n_y x n_y matrix.

    Args:
        k: Nonzero wavenumber
        grid: Channel grid (only the y-nodes are used)
        delta: Damping exponent in |k|^{1-delta}
        scheme: "alternating" (exactly Hermitian) or "subtracted"

    Returns:
        SioOperator

    Raises:
        WavenumberError: For k = 0
    """
    if k == 0:
        raise WavenumberError("J_k is defined for k != 0 only")
    y = grid.y_nodes
    kernel = green_function(k, y[:, None], y[None, :])
    diagonal_limit = -0.5 * green_diagonal_slope(k, y)
    real_part = _pv_matrix(kernel, diagonal_limit, grid, scheme)
    matrix = (sio_prefactor(k, delta) / 2.0) * (-1j) * real_part
    return SioOperator(k=int(k), matrix=matrix, quadrature_tag=SCHEME_TAGS[scheme], damping_delta=delta, h=grid.h)


def assemble_commutator(
    k: int, grid: ChannelGrid, delta: float = 0.0, scheme: Scheme = "alternating"
) -> CommutatorOperator:
    """Assemble H_k with the same prefactor and p.v. rule as J_k.

    Raises:
        WavenumberError: For k = 0
    """
    if k == 0:
        raise WavenumberError("H_k is defined for k != 0 only")
    y = grid.y_nodes
    a = abs(float(k))
    kernel = commutator_kernel(k, y[:, None], y[None, :])
    # -d_{y'} H_k(y, y') at y' = y, i.e. |k| cosh(2ky)/sinh(2k)
    s = np.abs(y)
    diagonal_limit = a * np.exp(2.0 * a * (s - 1.0)) * (1.0 + np.exp(-4.0 * a * s)) / (-np.expm1(-4.0 * a))
    real_part = _pv_matrix(kernel, diagonal_limit, grid, scheme)
    matrix = (sio_prefactor(k, delta) / 2.0) * (-1j) * real_part
    return CommutatorOperator(k=int(k), matrix=matrix, quadrature_tag=SCHEME_TAGS[scheme], h=grid.h)


# The kernel of H_k is O(1) only within 1/|k| of a wall, so nodal matrices on the
# uniform grid stop resolving it once |k| h is not small. Under y = tanh(s) the
# map f -> f(tanh s) sech(s) is unitary from L2(dy) onto L2(ds) and
#
#     p.v. int K(y, y') f(y') / (y - y') dy' = p.v. int K(tanh s, tanh s') F(s') / sinh(s - s') ds',
#
# so a uniform s-grid is uniform in log-distance to the walls.

GRADED_SPAN = 12.0


def graded_nodes(n_nodes: int, span: float = GRADED_SPAN) -> Tuple[np.ndarray, float]:
    """Uniform interior nodes on (-span, span) and their spacing."""
    if n_nodes < 2:
        raise ValueError(f"graded grid needs at least 2 nodes, got {n_nodes}")
    h = 2.0 * span / (n_nodes + 1)
    return -span + h * np.arange(1, n_nodes + 1), h


def _graded_commutator_kernel(k: int, s: np.ndarray) -> np.ndarray:
    """-sinh(k(y + y'))/sinh(2k) at y = tanh(s), without cancellation near the walls."""
    a = abs(float(k))
    wall = 2.0 / (np.exp(2.0 * np.abs(s)) + 1.0)  # 1 - |tanh s|
    y = np.sign(s) * (1.0 - wall)
    total = y[:, None] + y[None, :]
    same_side = (np.sign(s)[:, None] * np.sign(s)[None, :]) > 0
    gap = np.where(same_side, wall[:, None] + wall[None, :], 2.0 - np.abs(total))  # 2 - |y + y'|
    return -np.sign(total) * np.exp(-a * gap) * (-np.expm1(-2.0 * a * (2.0 - gap))) / (-np.expm1(-4.0 * a))


def assemble_commutator_graded(
    k: int, n_nodes: int, delta: float = 0.0, span: float = GRADED_SPAN
) -> CommutatorOperator:
    """H_k on the wall-graded grid, acting on F(s) = f(tanh s) sech(s).

    The alternating rule in s keeps the matrix exactly Hermitian. The weights
    are uniform, so the plain spectral norm is the L2(-1, 1) norm of H_k.

    Raises:
        WavenumberError: For k = 0
    """
    if k == 0:
        raise WavenumberError("H_k is defined for k != 0 only")
    s, h = graded_nodes(n_nodes, span)
    idx = np.arange(s.size)
    odd = (idx[:, None] - idx[None, :]) % 2 == 1
    diff = np.where(odd, s[:, None] - s[None, :], 1.0)
    real_part = np.where(odd, 2.0 * h * _graded_commutator_kernel(k, s) / np.sinh(diff), 0.0)
    matrix = (sio_prefactor(k, delta) / 2.0) * (-1j) * real_part
    return CommutatorOperator(k=int(k), matrix=matrix, quadrature_tag=SCHEME_TAGS["graded"], h=h)


def whole_line_symbol(k: float, xi) -> np.ndarray:
    """Fourier multiplier of J_k away from the walls: sgn(k) arctan(xi/|k|)/2.

    Transport by Couette flow moves frequencies xi -> xi - kt, down this
    monotone symbol, which is where the damping term of the energy comes from.
    """
    if k == 0:
        raise WavenumberError("whole_line_symbol requires k != 0")
    return np.sign(k) * np.arctan(np.asarray(xi, dtype=float) / abs(k)) / 2.0
