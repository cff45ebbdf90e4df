"""Hypocoercive energy functionals, dissipation and budget verification."""
from couette_lab.modules.energy.budget import (
    MONOTONICITY_FRACTION,
    BootstrapReport,
    LinearBudgetReport,
    verify_linear_budget,
    verify_nonlinear_bootstrap,
)
from couette_lab.modules.energy.functionals import (
    ENERGY_COLUMNS,
    PER_K_COLUMNS,
    DissipationTerms,
    EnergySnapshot,
    ModeEnergy,
    aggregate,
    coercivity_bounds,
    dissipation_k,
    dissipation_tau_by_green,
    energy_k,
    mode_energy,
)
from couette_lab.modules.energy.ledger import EnergyLedger, LedgerAudit
from couette_lab.modules.energy.rates import fit_decay_rate

__all__ = [
    "BootstrapReport",
    "DissipationTerms",
    "ENERGY_COLUMNS",
    "EnergyLedger",
    "EnergySnapshot",
    "LedgerAudit",
    "LinearBudgetReport",
    "MONOTONICITY_FRACTION",
    "ModeEnergy",
    "PER_K_COLUMNS",
    "aggregate",
    "coercivity_bounds",
    "dissipation_k",
    "dissipation_tau_by_green",
    "energy_k",
    "fit_decay_rate",
    "mode_energy",
    "verify_linear_budget",
    "verify_nonlinear_bootstrap",
]
