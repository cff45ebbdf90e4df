"""The hypocoercive energy E_k, its dissipation D_k and the weighted aggregates.

Per mode, with J = J_k and X = nu^{2/3} |k|^{-2/3} ||d_y omega||^2:

    E_k = ||omega||^2 + c_alpha X
          - c_beta nu^{1/3} |k|^{-4/3} Re<ik omega, d_y omega>
          + c_tau Re<omega, J omega> + c_tau c_alpha nu^{2/3} |k|^{-2/3} Re<d_y omega, J d_y omega>

The J terms use the collocation inner product on the y-nodes; everything else
is exact on coefficients.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Mapping, NamedTuple, Sequence

import numpy as np

from couette_lab.core.exceptions import GridError, OperatorCacheMiss, WavenumberError
from couette_lab.modules.energy.ledger import EnergyLedger
from couette_lab.modules.sio.operators import SioOperator
from couette_lab.modules.spectral.fields import Basis
from couette_lab.modules.spectral.green import green_solve_gauss
from couette_lab.modules.spectral.poisson import half_wavenumbers, inner_product
from couette_lab.modules.spectral.transforms import cosine_values, inverse_sine_transform

logger = logging.getLogger(__name__)


def _check_k(k: int) -> None:
    if k == 0:
        raise WavenumberError("the per-mode energy is defined for k != 0; use aggregate() for the k = 0 mode")


def _lookup(sio_ops: Mapping[int, SioOperator], k: int, n_y: int) -> SioOperator:
    op = sio_ops.get(k) if sio_ops is not None else None
    if op is None:
        raise OperatorCacheMiss(f"no SIO supplied for k={k}")
    if op.n_y != n_y:
        raise GridError(f"SIO for k={k} acts on {op.n_y} nodes, omega_k has {n_y}")
    return op


def energy_k(omega_k: np.ndarray, k: int, ledger: EnergyLedger, sio_ops: Mapping[int, SioOperator]) -> float:
    """Five-term hypocoercive energy of one mode.

    Args:
        omega_k: Sine coefficients
        k: Nonzero wavenumber
        ledger: Energy constants (nu included)
        sio_ops: Mapping k -> SioOperator

    Returns:
        E_k

    Raises:
        OperatorCacheMiss: When sio_ops has no operator for k
    """
    _check_k(k)
    omega_k = np.asarray(omega_k, dtype=complex)
    op = _lookup(sio_ops, k, omega_k.shape[-1])
    nu, a = ledger.nu, abs(float(k))
    lam = half_wavenumbers(omega_k.shape[-1])
    dy_omega = omega_k * lam

    plain = float(np.sum(np.abs(omega_k) ** 2))
    gradient = float(np.sum(np.abs(dy_omega) ** 2))
    mixed = inner_product(1j * k * omega_k, Basis.SINE, dy_omega, Basis.COSINE).real

    values = inverse_sine_transform(omega_k)
    dy_values = cosine_values(dy_omega, closed=False)
    sio_plain = op.quadratic_form(values).real
    sio_gradient = op.quadratic_form(dy_values).real

    anisotropic = nu ** (2.0 / 3.0) * a ** (-2.0 / 3.0)
    return float(
        plain
        + ledger.c_alpha * anisotropic * gradient
        - ledger.c_beta * nu ** (1.0 / 3.0) * a ** (-4.0 / 3.0) * mixed
        + ledger.c_tau * sio_plain
        + ledger.c_tau * ledger.c_alpha * anisotropic * sio_gradient
    )


def coercivity_bounds(omega_k: np.ndarray, k: int, ledger: EnergyLedger, norm_J: float) -> tuple:
    """Lower and upper bounds of E_k in terms of ||omega||^2 and X.

    Returns:
        (lower, upper)
    """
    _check_k(k)
    omega_k = np.asarray(omega_k)
    plain = float(np.sum(np.abs(omega_k) ** 2))
    x = ledger.nu ** (2.0 / 3.0) * abs(float(k)) ** (-2.0 / 3.0) * float(
        np.sum(half_wavenumbers(omega_k.shape[-1]) ** 2 * np.abs(omega_k) ** 2)
    )
    cross = ledger.c_beta**2 / (2.0 * ledger.c_alpha) if ledger.c_alpha > 0 else (0.0 if ledger.c_beta == 0 else np.inf)
    sio = ledger.c_tau * norm_J
    lower = (1.0 - sio - cross) * plain + ledger.c_alpha * (0.5 - sio) * x
    upper = (1.0 + sio + cross) * plain + ledger.c_alpha * (1.5 + sio) * x
    return float(lower), float(upper)


class DissipationTerms(NamedTuple):
    gamma: float
    alpha: float
    beta: float
    tau: float
    tau_alpha: float
    total: float


def dissipation_k(omega_k: np.ndarray, k: int, ledger: EnergyLedger) -> DissipationTerms:
    """The five dissipation terms of one mode and their weighted total.

    D_gamma   = nu ||grad_k omega||^2
    D_alpha   = nu^{5/3} |k|^{-2/3} ||grad_k d_y omega||^2
    D_beta    = nu^{1/3} |k|^{2/3} ||omega||^2
    D_tau     = |k|^{2-delta} ||grad_k phi||^2
    D_tau_alpha = nu^{2/3} |k|^{4/3-delta} ||grad_k d_y phi||^2
    """
    _check_k(k)
    omega_k = np.asarray(omega_k)
    nu, a, delta = ledger.nu, abs(float(k)), ledger.delta
    mu = half_wavenumbers(omega_k.shape[-1]) ** 2
    symbol = a * a + mu
    sq = np.abs(omega_k) ** 2

    gamma = nu * float(np.sum(symbol * sq))
    alpha = nu ** (5.0 / 3.0) * a ** (-2.0 / 3.0) * float(np.sum(symbol * mu * sq))
    beta = nu ** (1.0 / 3.0) * a ** (2.0 / 3.0) * float(np.sum(sq))
    tau = a ** (2.0 - delta) * float(np.sum(sq / symbol))
    tau_alpha = nu ** (2.0 / 3.0) * a ** (4.0 / 3.0 - delta) * float(np.sum(mu * sq / symbol))
    total = (
        gamma
        + ledger.c_alpha * alpha
        + ledger.c_beta * beta
        + ledger.c_tau * tau
        + ledger.c_tau * ledger.c_alpha * tau_alpha
    )
    return DissipationTerms(gamma, alpha, beta, tau, tau_alpha, total)


def dissipation_tau_by_green(omega_k: np.ndarray, k: int, ledger: EnergyLedger, n_quad: int = 96) -> float:
    """D_tau evaluated in physical space through the Gauss-Legendre Green route."""
    _check_k(k)
    quad = green_solve_gauss(omega_k, k, n_quad)
    gradient = np.sum(quad.weights * (k * k * np.abs(quad.phi) ** 2 + np.abs(quad.dphi) ** 2))
    return float(abs(float(k)) ** (2.0 - ledger.delta) * gradient)


@dataclass
class ModeEnergy:
    """Energy and dissipation of one mode at one time."""

    k: int
    t: float
    nu: float
    energy: float
    d_gamma: float
    d_alpha: float
    d_beta: float
    d_tau: float
    d_tau_alpha: float
    dissipation: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def mode_energy(
    omega_k: np.ndarray, k: int, t: float, ledger: EnergyLedger, sio_ops: Mapping[int, SioOperator]
) -> ModeEnergy:
    """energy_k and dissipation_k bundled for one sample."""
    terms = dissipation_k(omega_k, k, ledger)
    return ModeEnergy(
        k=int(k),
        t=float(t),
        nu=ledger.nu,
        energy=energy_k(omega_k, k, ledger, sio_ops),
        d_gamma=terms.gamma,
        d_alpha=terms.alpha,
        d_beta=terms.beta,
        d_tau=terms.tau,
        d_tau_alpha=terms.tau_alpha,
        dissipation=terms.total,
    )


ENERGY_COLUMNS = ["t", "E0", "Eneq", "E", "D0", "Dneq", "DE", "D"]
PER_K_COLUMNS = ["t", "k", "Ek", "Dk_gamma", "Dk_alpha", "Dk_beta", "Dk_tau", "Dk_tau_alpha", "Dk"]


@dataclass
class EnergySnapshot:
    """Weighted aggregate energy and dissipation at one time."""

    t: float
    E0: float
    Eneq: float
    E: float
    D0: float
    Dneq: float
    DE: float
    D: float
    modes: List[ModeEnergy] = field(default_factory=list)

    def to_row(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in ENERGY_COLUMNS}

    def per_k_rows(self) -> List[Dict[str, float]]:
        return [
            {
                "t": self.t,
                "k": mode.k,
                "Ek": mode.energy,
                "Dk_gamma": mode.d_gamma,
                "Dk_alpha": mode.d_alpha,
                "Dk_beta": mode.d_beta,
                "Dk_tau": mode.d_tau,
                "Dk_tau_alpha": mode.d_tau_alpha,
                "Dk": mode.dissipation,
            }
            for mode in self.modes
        ]


def aggregate(
    per_k: Sequence[ModeEnergy],
    omega_0: np.ndarray,
    ledger: EnergyLedger,
    t: float,
) -> EnergySnapshot:
    """Combine per-mode energies and the k = 0 mode into the weighted totals.

    Args:
        per_k: Nonzero-mode energies evaluated at time t
        omega_0: Sine coefficients of the x-average (zeros for linear runs)
        ledger: Energy constants
        t: Sample time

    Raises:
        ValueError: When a mode was evaluated at another nu or t
    """
    nu = ledger.nu
    for mode in per_k:
        if mode.nu != nu:
            raise ValueError(f"mode k={mode.k} evaluated at nu={mode.nu}, ledger has nu={nu}")
        if not np.isclose(mode.t, t, rtol=0.0, atol=1e-12 * max(1.0, abs(t))):
            raise ValueError(f"mode k={mode.k} evaluated at t={mode.t}, aggregating at t={t}")

    omega_0 = np.asarray(omega_0)
    mu = half_wavenumbers(omega_0.shape[-1]) ** 2
    sq0 = np.abs(omega_0) ** 2
    mean_weight = np.exp(2.0 * ledger.delta_star * nu * t)
    e0 = mean_weight * (float(np.sum(sq0)) + ledger.c_alpha * nu ** (2.0 / 3.0) * float(np.sum(mu * sq0)))
    d0 = mean_weight * (nu * float(np.sum(mu * sq0)) + ledger.c_alpha * nu ** (5.0 / 3.0) * float(np.sum(mu**2 * sq0)))

    weight = np.exp(2.0 * ledger.delta_star * nu ** (1.0 / 3.0) * t)
    e_neq = d_neq = damping = 0.0
    for mode in per_k:
        a = abs(float(mode.k))
        e_neq += weight * a ** (2.0 * ledger.m) * mode.energy
        d_neq += weight * a ** (2.0 * ledger.m) * mode.dissipation
        damping += weight * a ** (2.0 * ledger.m + 2.0 / 3.0) * mode.energy
    d_e = nu * e0 + nu ** (1.0 / 3.0) * damping

    return EnergySnapshot(
        t=float(t),
        E0=float(e0),
        Eneq=float(e_neq),
        E=float(e0 + e_neq),
        D0=float(d0),
        Dneq=float(d_neq),
        DE=float(d_e),
        D=float(d0 + d_neq + d_e),
        modes=list(per_k),
    )
