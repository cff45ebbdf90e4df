"""Background shear: heat-extended W and the Biot-Savart shear U.

    d_t W = nu d_yy W,  W(+-1) = 0
    U(t, y) = y + d_y (d_yy^{-1} W)

On the sine basis W = sum w_n sin_n, the correction U - y is the cosine series
-w_n/(n pi/2), so U' = 1 + W and U'' = d_y W.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from couette_lab.core.exceptions import ShearProfileError
from couette_lab.modules.spectral.fields import Basis
from couette_lab.modules.spectral.grid import ChannelGrid
from couette_lab.modules.spectral.poisson import derivative_coeffs, half_wavenumbers
from couette_lab.modules.spectral.transforms import (
    cosine_values,
    inverse_sine_transform,
    padded_values_y,
    sine_transform,
)

logger = logging.getLogger(__name__)

TRACE_TOLERANCE = 1e-10


def shear_correction_coeffs(w_coeffs: np.ndarray) -> np.ndarray:
    """Cosine coefficients of U - y, i.e. d_y of the Dirichlet d_yy^{-1} W."""
    w_coeffs = np.asarray(w_coeffs, dtype=float)
    lam = half_wavenumbers(w_coeffs.shape[-1])
    stream = -w_coeffs / lam**2
    correction, _ = derivative_coeffs(stream, Basis.SINE)
    return correction


def reconstruct_shear(w_coeffs: np.ndarray, grid: ChannelGrid) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """U, U' and U'' on the y-nodes from the sine coefficients of W.

    U' and U'' come from differentiating the reconstruction, not from W
    directly, so any inconsistency shows up in U' - 1 - W.

    Returns:
        (U, U', U'') as real arrays of length n_y
    """
    correction = shear_correction_coeffs(w_coeffs)
    u = grid.y_nodes + cosine_values(correction, closed=False)
    first, first_basis = derivative_coeffs(correction, Basis.COSINE)
    second, _ = derivative_coeffs(first, first_basis)
    u_prime = 1.0 + inverse_sine_transform(first)
    u_double_prime = cosine_values(second, closed=False)
    return u, u_prime, u_double_prime


def sobolev_norm_h4(w_coeffs: np.ndarray, convention: str = "bessel") -> float:
    """Discrete H^4 norm of W.

    Args:
        w_coeffs: Sine coefficients
        convention: "bessel" weights (1 + (n pi/2)^2)^4; "full" weights
            sum_{j<=4} (n pi/2)^{2j}, i.e. sum_j ||d^j W||^2. The two are equivalent.

    Returns:
        The norm (square-rooted sum)
    """
    w_coeffs = np.asarray(w_coeffs)
    mu = half_wavenumbers(w_coeffs.shape[-1]) ** 2
    if convention == "bessel":
        weights = (1.0 + mu) ** 4
    elif convention == "full":
        weights = sum(mu**j for j in range(5))
    else:
        raise ValueError(f"unknown H4 convention '{convention}'")
    return float(np.sqrt(np.sum(weights * np.abs(w_coeffs) ** 2)))


@dataclass(frozen=True)
class ShearProfile:
    """Immutable snapshot of the shear state at time t."""

    grid: ChannelGrid
    t: float
    nu: float
    w_coeffs: np.ndarray
    u_values: np.ndarray
    u_prime: np.ndarray
    u_double_prime: np.ndarray

    @classmethod
    def from_coeffs(cls, grid: ChannelGrid, w_coeffs: np.ndarray, nu: float, t: float = 0.0) -> "ShearProfile":
        w_coeffs = np.asarray(w_coeffs, dtype=float)
        if w_coeffs.shape != (grid.n_y,):
            raise ShearProfileError(f"expected {grid.n_y} W coefficients, got shape {w_coeffs.shape}")
        u, u_prime, u_double_prime = reconstruct_shear(w_coeffs, grid)
        return cls(grid, float(t), float(nu), w_coeffs, u, u_prime, u_double_prime)

    @classmethod
    def couette(cls, grid: ChannelGrid, nu: float, t: float = 0.0) -> "ShearProfile":
        return cls.from_coeffs(grid, np.zeros(grid.n_y), nu, t)

    @property
    def w_values(self) -> np.ndarray:
        return inverse_sine_transform(self.w_coeffs)

    def padded(self) -> Tuple[np.ndarray, np.ndarray]:
        """U and U'' on the padded y-grid used for dealiased products."""
        grid = self.grid
        correction = shear_correction_coeffs(self.w_coeffs)
        u = grid.padded_y_nodes + padded_values_y(correction, Basis.COSINE, grid)
        lam = grid.half_wavenumbers
        u_double_prime = padded_values_y(self.w_coeffs * lam, Basis.COSINE, grid)
        return u, u_double_prime

    def max_abs_u(self) -> float:
        u, _ = self.padded()
        return float(np.max(np.abs(u)))

    def h4_norm(self) -> float:
        return sobolev_norm_h4(self.w_coeffs)

    def __repr__(self) -> str:
        return f"ShearProfile(t={self.t:.4g}, nu={self.nu:g}, |W|_H4={self.h4_norm():.3e})"


def heat_step(profile: ShearProfile, dt: float) -> ShearProfile:
    """Advance W by the exact Dirichlet heat semigroup.

    Args:
        profile: Current shear state
        dt: Time increment (>= 0)

    Returns:
        New ShearProfile at t + dt with U fields recomputed

    Raises:
        ShearProfileError: For negative dt
    """
    if dt < 0:
        raise ShearProfileError(f"heat_step requires dt >= 0, got {dt}")
    if dt == 0:
        return profile
    decay = np.exp(-profile.nu * profile.grid.mu * dt)
    return ShearProfile.from_coeffs(profile.grid, profile.w_coeffs * decay, profile.nu, profile.t + dt)


def parse_shear_preset(preset: str, mode: int = 1, amplitude: float = 0.0, seed: int = 0) -> Tuple[str, int, float, int]:
    """Split compact preset strings like "single_mode 2 1e-8" into fields.

    Returns:
        (name, mode, amplitude, seed)
    """
    parts = preset.split()
    if not parts:
        raise ShearProfileError("empty shear preset")
    name = parts[0]
    try:
        if name == "single_mode" and len(parts) == 3:
            mode, amplitude = int(parts[1]), float(parts[2])
        elif name == "random_h4" and len(parts) == 3:
            seed, amplitude = int(parts[1]), float(parts[2])
        elif len(parts) != 1:
            raise ShearProfileError(f"cannot parse shear preset '{preset}'")
    except ValueError as exc:
        raise ShearProfileError(f"cannot parse shear preset '{preset}': {exc}") from exc
    return name, mode, amplitude, seed


def load_shear_coeffs(
    grid: ChannelGrid,
    preset: str = "zero",
    mode: int = 1,
    amplitude: float = 0.0,
    seed: int = 0,
    path: Optional[str] = None,
) -> np.ndarray:
    """Sine coefficients of W_in from a preset or a one-column text file.

    Presets:
        zero                      W = 0
        single_mode n amp         W = amp sin(n pi (y+1)/2)
        random_h4 seed amp        smooth random W with ||W||_H4 = amp
        file                      values on the y-nodes (n_y rows), or on the
                                  closed grid (n_y + 2 rows, walls included)

    Raises:
        ShearProfileError: Unknown preset, unreadable file or nonzero wall trace
    """
    name, mode, amplitude, seed = parse_shear_preset(preset, mode, amplitude, seed)
    n_y = grid.n_y

    if name == "zero":
        return np.zeros(n_y)

    if name == "single_mode":
        if not (1 <= mode <= n_y):
            raise ShearProfileError(f"shear mode {mode} outside 1..{n_y}")
        coeffs = np.zeros(n_y)
        coeffs[mode - 1] = amplitude
        return coeffs

    if name == "random_h4":
        rng = np.random.default_rng(seed)
        band = min(n_y, 16)
        coeffs = np.zeros(n_y)
        mu = grid.mu[:band]
        coeffs[:band] = rng.standard_normal(band) / (1.0 + mu) ** 3
        norm = sobolev_norm_h4(coeffs)
        return coeffs * (amplitude / norm) if norm > 0 else coeffs

    if name == "file":
        if not path:
            raise ShearProfileError("the 'file' shear preset needs a path")
        try:
            values = np.loadtxt(Path(path), dtype=float, ndmin=1)
        except (OSError, ValueError) as exc:
            raise ShearProfileError(f"cannot read shear file {path}: {exc}") from exc
        if values.ndim != 1:
            raise ShearProfileError(f"shear file {path} must have one column")
        if values.size == n_y + 2:
            trace = max(abs(values[0]), abs(values[-1]))
            if trace > TRACE_TOLERANCE:
                raise ShearProfileError(f"W_in boundary trace {trace:.3e} exceeds {TRACE_TOLERANCE:g}")
            values = values[1:-1]
        elif values.size != n_y:
            raise ShearProfileError(f"shear file has {values.size} rows, expected {n_y} or {n_y + 2}")
        logger.info(f"Loaded W_in from {path} ({values.size} values)")
        return sine_transform(values)

    raise ShearProfileError(f"unknown shear preset '{name}'")
