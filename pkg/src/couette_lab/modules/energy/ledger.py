"""Constants of the hypocoercive energy and the inequalities they must satisfy."""

import logging
from dataclasses import dataclass, field
from typing import Dict

from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)


@dataclass
class LedgerAudit:
    """Outcome of the constant-ledger check.

    `checks` maps each inequality to whether it holds; `values` records the
    two sides as (lhs, rhs) so a failing entry can be read off directly.
    """

    checks: Dict[str, bool] = field(default_factory=dict)
    values: Dict[str, tuple] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list:
        return [name for name, ok in self.checks.items() if not ok]

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "checks": dict(self.checks),
            "values": {name: list(pair) for name, pair in self.values.items()},
        }


class EnergyLedger(BaseModel):
    """Weights of the energy functional E_k and the target decay constant."""

    model_config = ConfigDict(frozen=True)

    c_alpha: float = Field(ge=0.0)
    c_beta: float = Field(ge=0.0)
    c_tau: float = Field(ge=0.0)
    delta_star: float = Field(gt=0.0)
    delta0: float = Field(gt=0.0)
    delta1: float = Field(0.1, gt=0.0)
    K0: float = Field(64.0, gt=0.0)
    m: float = 0.75
    delta: float = Field(0.0, ge=0.0, lt=1.0)
    nu: float = Field(gt=0.0)

    @classmethod
    def from_k0(cls, K0: float = 64.0, nu: float = 1e-3, **overrides) -> "EnergyLedger":
        """The example ledger: c_tau = 1/(64 K0), c_alpha = K0^-9, c_beta = K0^-6,
        delta0 = (64 K0)^-2 / 2, delta* = 1/64.

        Args:
            K0: Ledger scale
            nu: Viscosity
            **overrides: Any field to replace (None values are ignored)
        """
        values = {
            "c_tau": 1.0 / (64.0 * K0),
            "c_alpha": K0**-9,
            "c_beta": K0**-6,
            "delta0": 0.5 * (64.0 * K0) ** -2,
            "delta_star": 1.0 / 64.0,
            "K0": K0,
            "nu": nu,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    @classmethod
    def from_section(cls, section, nu: float) -> "EnergyLedger":
        """Build from a LedgerSection; unset constants follow from_k0."""
        return cls.from_k0(
            section.K0,
            nu,
            c_alpha=section.c_alpha,
            c_beta=section.c_beta,
            c_tau=section.c_tau,
            delta_star=section.delta_star,
            delta0=section.delta0,
            delta1=section.delta1,
            m=section.m,
            delta=section.delta,
        )

    def audit(self) -> LedgerAudit:
        """Check the six ledger inequalities.

        Returns:
            LedgerAudit; a failing entry is logged at WARNING
        """
        K0 = self.K0
        c_a, c_b, c_t = self.c_alpha, self.c_beta, self.c_tau
        pairs = {
            "c_tau < 1/(32 K0)": (c_t, 1.0 / (32.0 * K0), "lt"),
            "K0 delta0 < c_tau/32": (K0 * self.delta0, c_t / 32.0, "lt"),
            "c_alpha < min(1/(8 K0 delta0), 1)": (c_a, min(1.0 / (8.0 * K0 * self.delta0), 1.0), "lt"),
            "c_alpha/c_beta < 1/(25 K0)": (c_a / c_b if c_b > 0 else float("inf"), 1.0 / (25.0 * K0), "lt"),
            "c_beta^2/(2 c_alpha) < 1/(25 K0^2)": (
                c_b**2 / (2.0 * c_a) if c_a > 0 else float("inf"),
                1.0 / (25.0 * K0**2),
                "lt",
            ),
            "c_beta^2 <= c_alpha/4 + (1 - c_tau)/4": (c_b**2, c_a / 4.0 + (1.0 - c_t) / 4.0, "le"),
        }
        audit = LedgerAudit()
        for name, (lhs, rhs, op) in pairs.items():
            audit.checks[name] = bool(lhs < rhs) if op == "lt" else bool(lhs <= rhs)
            audit.values[name] = (float(lhs), float(rhs))
        if not audit.passed:
            logger.warning(f"Energy ledger violates: {', '.join(audit.failures)}")
        return audit

    def __repr__(self) -> str:
        return (
            f"EnergyLedger(K0={self.K0:g}, c_tau={self.c_tau:.3e}, c_alpha={self.c_alpha:.3e}, "
            f"c_beta={self.c_beta:.3e}, delta*={self.delta_star:g}, nu={self.nu:g})"
        )
