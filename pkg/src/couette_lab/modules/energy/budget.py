"""Budget verification along sampled energy trajectories.

Linear runs check the per-mode differential inequality

    dE_k/dt <= -8 delta* (D_k + nu^{1/3} |k|^{2/3} E_k)

and nonlinear runs check the bootstrap inequality on the weighted aggregates.
Derivatives are taken from the samples with second-order differences, so the
verdict is only as good as the sampling interval.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from couette_lab.core.exceptions import SamplingError
from couette_lab.modules.energy.functionals import EnergySnapshot, ModeEnergy
from couette_lab.modules.energy.ledger import EnergyLedger, LedgerAudit

logger = logging.getLogger(__name__)

# Lower bound on -dE/dt / D_k from the monotonicity estimate
MONOTONICITY_FRACTION = 1.0 / 36.0


def _check_sampling(times: np.ndarray, dt: float, minimum: int = 3) -> None:
    if times.size < minimum:
        raise SamplingError(f"need at least {minimum} samples, got {times.size}")
    if dt <= 0:
        raise SamplingError(f"sample interval must be positive, got {dt}")
    steps = np.diff(times)
    if not np.allclose(steps, dt, rtol=1e-6, atol=1e-12):
        raise SamplingError(f"samples are not uniformly spaced at dt={dt} (spacing {steps.min():.6g}..{steps.max():.6g})")


@dataclass
class LinearBudgetReport:
    """Verdict of the per-mode differential and integrated budget checks."""

    k: int
    n_samples: int
    tolerance: float
    margins: List[float]
    violations: List[int]
    endpoint_violations: List[int]
    empirical_delta_star: float
    dissipation_fraction: float
    integrated_lhs: List[float]
    integrated_passed: bool
    best_integrated_constant: float
    ledger_audit: LedgerAudit = field(default_factory=LedgerAudit)

    @property
    def fraction_ok(self) -> bool:
        return self.dissipation_fraction >= MONOTONICITY_FRACTION

    @property
    def passed(self) -> bool:
        return not self.violations and self.ledger_audit.passed

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["ledger_audit"] = self.ledger_audit.to_dict()
        data["passed"] = self.passed
        data["fraction_ok"] = self.fraction_ok
        return data


def verify_linear_budget(
    trajectory: Sequence[ModeEnergy],
    ledger: EnergyLedger,
    dt: float,
    tolerance: float = 1e-6,
) -> LinearBudgetReport:
    """Check the differential energy budget of one mode.

    Args:
        trajectory: ModeEnergy samples of a single k, uniformly spaced
        ledger: Energy constants
        dt: Sample interval
        tolerance: Violations are margins below -tolerance * max D_k

    Returns:
        LinearBudgetReport

    Raises:
        SamplingError: Fewer than three samples or non-uniform spacing
    """
    times = np.array([s.t for s in trajectory], dtype=float)
    _check_sampling(times, dt)
    ks = {s.k for s in trajectory}
    if len(ks) != 1:
        raise SamplingError(f"trajectory mixes wavenumbers {sorted(ks)}")
    k = ks.pop()
    a = abs(float(k))

    energy = np.array([s.energy for s in trajectory])
    dissipation = np.array([s.dissipation for s in trajectory])
    tau = np.array([s.d_tau for s in trajectory])
    d_energy = np.gradient(energy, dt, edge_order=2)

    damping = dissipation + ledger.nu ** (1.0 / 3.0) * a ** (2.0 / 3.0) * energy
    margins = -8.0 * ledger.delta_star * damping - d_energy
    threshold = -tolerance * float(np.max(np.abs(dissipation)))
    bad = np.flatnonzero(margins < threshold)
    last = times.size - 1
    violations = [int(i) for i in bad if 0 < i < last]
    endpoint_violations = [int(i) for i in bad if i in (0, last)]

    with np.errstate(divide="ignore", invalid="ignore"):
        interior = slice(1, last)
        ratios = -d_energy[interior] / (8.0 * damping[interior])
        fractions = -d_energy[interior] / dissipation[interior]
    empirical = float(np.nanmin(ratios)) if np.any(np.isfinite(ratios)) else float("nan")
    fraction = float(np.nanmin(fractions)) if np.any(np.isfinite(fractions)) else float("nan")

    growth = np.exp(2.0 * ledger.delta_star * ledger.nu ** (1.0 / 3.0) * a ** (2.0 / 3.0) * times)
    accumulated = cumulative_trapezoid(growth * tau, times, initial=0.0)
    lhs = growth * energy + 0.25 * ledger.c_tau * accumulated
    integrated_ok = bool(np.all(lhs <= energy[0] * (1.0 + tolerance) + abs(threshold)))
    with np.errstate(divide="ignore", invalid="ignore"):
        constants = (energy[0] - growth[1:] * energy[1:]) / accumulated[1:]
    best_constant = float(np.nanmin(constants)) if np.any(np.isfinite(constants)) else float("nan")

    report = LinearBudgetReport(
        k=int(k),
        n_samples=int(times.size),
        tolerance=tolerance,
        margins=margins.tolist(),
        violations=violations,
        endpoint_violations=endpoint_violations,
        empirical_delta_star=empirical,
        dissipation_fraction=fraction,
        integrated_lhs=lhs.tolist(),
        integrated_passed=integrated_ok,
        best_integrated_constant=best_constant,
        ledger_audit=ledger.audit(),
    )
    if violations:
        logger.warning(f"Linear budget k={k}: {len(violations)} interior violation(s), empirical delta*={empirical:.3e}")
    else:
        logger.info(f"Linear budget k={k} holds on {times.size} samples (empirical delta*={empirical:.3e})")
    return report


def _verdict(ok: Optional[bool]) -> str:
    return "skipped" if ok is None else ("ok" if ok else "fails")


@dataclass
class BootstrapReport:
    """Verdict of the nonlinear bootstrap checks on the aggregates.

    The integrated bound is only checked when the smallness condition holds;
    otherwise integrated_passed is None.
    """

    n_samples: int
    finite: bool
    fitted_C0: float
    max_defect: float
    smallness_passed: bool
    integrated_sup: float
    integrated_passed: Optional[bool]
    monotone_sup: float
    monotone_passed: bool
    E_initial: float
    defects: List[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.finite and self.integrated_passed is not False and self.monotone_passed

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["passed"] = self.passed
        return data


def verify_nonlinear_bootstrap(
    snapshots: Sequence[EnergySnapshot],
    ledger: EnergyLedger,
    dt: float,
    tolerance: float = 1e-6,
) -> BootstrapReport:
    """Check the bootstrap inequality dE/dt + 4 delta* D <= (C0 E/nu)^{1/2} D.

    C0 is fitted as the smallest constant that makes the inequality hold at
    every sample. Non-finite data produces a failing report instead of an
    exception.

    Raises:
        SamplingError: Fewer than three samples or non-uniform spacing
    """
    times = np.array([s.t for s in snapshots], dtype=float)
    _check_sampling(times, dt)
    energy = np.array([s.E for s in snapshots])
    dissipation = np.array([s.D for s in snapshots])
    nu, delta_star = ledger.nu, ledger.delta_star

    if not (np.all(np.isfinite(energy)) and np.all(np.isfinite(dissipation))):
        logger.warning("Bootstrap check skipped: non-finite energy or dissipation")
        nan = float("nan")
        return BootstrapReport(
            n_samples=int(times.size),
            finite=False,
            fitted_C0=nan,
            max_defect=nan,
            smallness_passed=False,
            integrated_sup=nan,
            integrated_passed=False,
            monotone_sup=nan,
            monotone_passed=False,
            E_initial=float(energy[0]),
        )

    d_energy = np.gradient(energy, dt, edge_order=2)
    base = d_energy + 4.0 * delta_star * dissipation
    usable = (base > 0) & (dissipation > 0) & (energy > 0)
    c0 = float(np.max(nu * (base[usable] / dissipation[usable]) ** 2 / energy[usable])) if np.any(usable) else 0.0
    defects = base - np.sqrt(c0 * np.clip(energy, 0.0, None) / nu) * dissipation

    smallness = bool(c0 == 0.0 or energy[0] <= delta_star**2 * nu / c0)
    accumulated = cumulative_trapezoid(dissipation, times, initial=0.0)
    integrated = float(np.max(energy + 2.0 * delta_star * accumulated))
    slack = energy[0] * (1.0 + tolerance)
    monotone = float(np.max(energy[1:]))

    report = BootstrapReport(
        n_samples=int(times.size),
        finite=True,
        fitted_C0=c0,
        max_defect=float(np.max(defects)),
        smallness_passed=smallness,
        integrated_sup=integrated,
        integrated_passed=bool(integrated <= slack) if smallness else None,
        monotone_sup=monotone,
        monotone_passed=bool(monotone <= slack),
        E_initial=float(energy[0]),
        defects=defects.tolist(),
    )
    logger.info(
        f"Bootstrap: C0={c0:.3e} smallness={'ok' if smallness else 'fails'} "
        f"integrated={_verdict(report.integrated_passed)} monotone={'ok' if report.monotone_passed else 'fails'}"
    )
    return report
