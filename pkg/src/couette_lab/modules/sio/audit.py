"""Numerical audits of the operator properties of J_k and H_k."""

import logging
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy import integrate, linalg

from couette_lab.core.exceptions import WavenumberError
from couette_lab.modules.sio.operators import (
    CommutatorOperator,
    Scheme,
    SioOperator,
    assemble_commutator,
    assemble_commutator_graded,
    assemble_sio,
    sio_prefactor,
)
from couette_lab.modules.spectral.green import green_function
from couette_lab.modules.spectral.grid import ChannelGrid

logger = logging.getLogger(__name__)

AUDIT_COLUMNS = [
    "k",
    "norm_J",
    "norm_H_over_k",
    "norm_H_over_k_nodal",
    "selfadj_residual",
    "coercivity_min_eig",
    "n_y",
    "kh",
]


def _weighted(matrix: np.ndarray, weights: Optional[np.ndarray]) -> np.ndarray:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    if weights is None:
        return matrix
    root = np.sqrt(np.asarray(weights, dtype=float))
    return root[:, None] * matrix / root[None, :]


def operator_norm(matrix: np.ndarray, weights: Optional[np.ndarray] = None) -> float:
    """Largest singular value in the quadrature-weighted L2 inner product.

    Args:
        matrix: Square matrix acting on node values
        weights: Quadrature weights (uniform when omitted)

    Raises:
        ValueError: For non-square input
    """
    similar = _weighted(matrix, weights)
    return float(linalg.svdvals(similar)[0])


def self_adjoint_residual(matrix: np.ndarray, weights: Optional[np.ndarray] = None) -> float:
    """||M - M*|| / ||M|| with M* the adjoint in the weighted inner product."""
    similar = _weighted(matrix, weights)
    scale = operator_norm(similar)
    if scale == 0.0:
        return 0.0
    return operator_norm(similar - similar.conj().T) / scale


def coercivity_min_eig(op: SioOperator, c_tau: float) -> float:
    """Smallest eigenvalue of the Hermitian part of 1 + c_tau J_k."""
    form = np.eye(op.n_y) + c_tau * op.matrix
    hermitian = 0.5 * (form + form.conj().T)
    return float(linalg.eigvalsh(hermitian)[0])


def excised_sio_value(
    k: int,
    y: float,
    f: Callable[[float], float],
    eps: float,
    delta: float = 0.0,
) -> complex:
    """J_{k,eps}[f](y): the integral with |y - y'| < eps removed, by adaptive quadrature."""
    if k == 0:
        raise WavenumberError("J_k is defined for k != 0 only")

    def integrand(yp: float) -> float:
        return float(green_function(k, y, yp)) * f(yp) / (y - yp)

    total = 0.0
    for lo, hi in ((-1.0, y - eps), (y + eps, 1.0)):
        if hi > lo:
            value, _ = integrate.quad(integrand, lo, hi, limit=400, epsabs=1e-14, epsrel=1e-12)
            total += value
    return complex(-0.5j * sio_prefactor(k, delta) * total)


def richardson_limit(eps_values: Sequence[float], values: Sequence[complex]) -> complex:
    """Extrapolate values(eps) to eps = 0 by polynomial interpolation (Lagrange at 0)."""
    eps = np.asarray(eps_values, dtype=float)
    vals = np.asarray(values, dtype=complex)
    if eps.size != vals.size or eps.size < 2:
        raise ValueError("richardson_limit needs matching arrays of at least two samples")
    result = 0.0 + 0.0j
    for i in range(eps.size):
        others = np.delete(eps, i)
        result += vals[i] * np.prod(-others / (eps[i] - others))
    return complex(result)


def excision_limit(
    k: int,
    y: float,
    f: Callable[[float], float],
    eps_values: Iterable[float] = (1e-2, 1e-3, 1e-4),
    delta: float = 0.0,
) -> complex:
    """p.v. value of J_k[f](y) from shrinking symmetric excisions."""
    eps_values = list(eps_values)
    values = [excised_sio_value(k, y, f, eps, delta) for eps in eps_values]
    return richardson_limit(eps_values, values)


@dataclass
class OperatorAuditRow:
    """One line of the operator-audit CSV."""

    k: int
    norm_J: float
    norm_H_over_k: float
    norm_H_over_k_nodal: float
    selfadj_residual: float
    coercivity_min_eig: float
    n_y: int
    kh: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def audit_operator_pair(
    sio: SioOperator,
    commutator: CommutatorOperator,
    c_tau: float,
    graded: Optional[CommutatorOperator] = None,
) -> OperatorAuditRow:
    """One audit row. norm_H_over_k comes from `graded` when given, else from the nodal H_k."""
    weights = np.full(sio.n_y, sio.h)
    nodal = operator_norm(commutator.matrix, weights) / abs(sio.k)
    return OperatorAuditRow(
        k=sio.k,
        norm_J=operator_norm(sio.matrix, weights),
        norm_H_over_k=operator_norm(graded.matrix) / abs(sio.k) if graded is not None else nodal,
        norm_H_over_k_nodal=nodal,
        selfadj_residual=self_adjoint_residual(sio.matrix, weights),
        coercivity_min_eig=coercivity_min_eig(sio, c_tau),
        n_y=sio.n_y,
        kh=abs(sio.k) * sio.h,
    )


def audit_operators(
    grid: ChannelGrid,
    k_values: Iterable[int],
    c_tau: float,
    delta: float = 0.0,
    scheme: Scheme = "alternating",
    sio_provider: Optional[Callable[[int], SioOperator]] = None,
    commutator_provider: Optional[Callable[[int], CommutatorOperator]] = None,
    graded_provider: Optional[Callable[[int], CommutatorOperator]] = None,
) -> List[OperatorAuditRow]:
    """Norms, self-adjointness and coercivity of J_k, H_k over a list of k.

    ||H_k|| / |k| is measured on the wall-graded grid with n_y nodes; the nodal
    value on the uniform grid is kept alongside and degrades once |k| h is not
    small. Providers let callers route assembly through a cache; by default the
    operators are assembled directly.
    """
    sio_provider = sio_provider or (lambda k: assemble_sio(k, grid, delta, scheme))
    commutator_provider = commutator_provider or (lambda k: assemble_commutator(k, grid, delta, scheme))
    graded_provider = graded_provider or (lambda k: assemble_commutator_graded(k, grid.n_y, delta))

    rows = []
    for k in k_values:
        row = audit_operator_pair(sio_provider(k), commutator_provider(k), c_tau, graded_provider(k))
        logger.debug(
            f"audit k={k} n_y={row.n_y}: |J|={row.norm_J:.6f} |H|/k={row.norm_H_over_k:.6f} "
            f"(nodal {row.norm_H_over_k_nodal:.6f}) selfadj={row.selfadj_residual:.2e}"
        )
        rows.append(row)
    return rows
