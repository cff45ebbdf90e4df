"""State containers for the linearised and nonlinear vorticity dynamics."""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from couette_lab.core.exceptions import WavenumberError
from couette_lab.modules.shear.profile import ShearProfile
from couette_lab.modules.spectral.fields import SpectralField


@dataclass(frozen=True)
class DynamicsOptions:
    """Switches shared by the linear and nonlinear solvers.

    Attributes:
        transport: Keep the background terms U d_x omega and U'' d_x phi.
            With transport off the evolution is pure diffusion.
        nonlinear: Keep u . grad omega (nonlinear solver only).
        cfl: Advective Courant number used for the step-size limit.
    """

    transport: bool = True
    nonlinear: bool = True
    cfl: float = 0.5


@dataclass(frozen=True)
class LinearModeState:
    """One x-Fourier mode omega_k(t, y) of the linearised problem."""

    k: int
    omega_k: np.ndarray
    t: float
    nu: float
    profile: ShearProfile

    def __post_init__(self):
        if self.k == 0:
            raise WavenumberError("the linear mode solver requires k != 0")
        object.__setattr__(self, "omega_k", np.asarray(self.omega_k, dtype=complex))

    def evolve(self, omega_k: np.ndarray, t: float, profile: ShearProfile) -> "LinearModeState":
        return replace(self, omega_k=omega_k, t=t, profile=profile)


@dataclass(frozen=True)
class NonlinearState:
    """Full perturbation omega(t, x, y) around the shear."""

    omega: SpectralField
    profile: ShearProfile
    t: float
    nu: float
    ledger: Optional[object] = None

    def evolve(self, omega: SpectralField, t: float, profile: ShearProfile) -> "NonlinearState":
        return replace(self, omega=omega, t=t, profile=profile)
