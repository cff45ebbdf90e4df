"""Singular integral operator J_k, commutator H_k and their audits."""
from couette_lab.modules.sio.audit import (
    AUDIT_COLUMNS,
    OperatorAuditRow,
    audit_operators,
    coercivity_min_eig,
    excised_sio_value,
    excision_limit,
    operator_norm,
    richardson_limit,
    self_adjoint_residual,
)
from couette_lab.modules.sio.operators import (
    GRADED_SPAN,
    CommutatorOperator,
    SioOperator,
    assemble_commutator,
    assemble_commutator_graded,
    assemble_sio,
    graded_nodes,
    sio_prefactor,
    whole_line_symbol,
)

__all__ = [
    "AUDIT_COLUMNS",
    "GRADED_SPAN",
    "CommutatorOperator",
    "OperatorAuditRow",
    "SioOperator",
    "assemble_commutator",
    "assemble_commutator_graded",
    "assemble_sio",
    "audit_operators",
    "coercivity_min_eig",
    "excised_sio_value",
    "excision_limit",
    "graded_nodes",
    "operator_norm",
    "richardson_limit",
    "self_adjoint_residual",
    "sio_prefactor",
    "whole_line_symbol",
]
