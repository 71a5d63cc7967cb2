"""Operator algebra.

Exact normal-ordered boson algebra, mean-field reduction onto a finite
basis and a truncated Fock-space oracle.
"""
from hilange.algebra.fock import (
    commutator_residual,
    default_cutoffs,
    fock_matrix,
    identity_residual,
    safe_indices,
)
from hilange.algebra.meanfield import (
    AffineForm,
    BasisSet,
    ClosureEntry,
    ClosureReport,
    MeanFieldContext,
    Reducer,
    mean_field_reduce,
    verify_closure,
)
from hilange.algebra.operators import (
    AntinormalExpr,
    Monomial,
    OperatorExpr,
    antinormal_order,
    commute,
    normal_order,
    parse_operator,
    standard_aliases,
)

# --------------------------------------------------------------------------- #
# Exported symbols
# --------------------------------------------------------------------------- #
__all__ = [
    "AffineForm",
    "AntinormalExpr",
    "BasisSet",
    "ClosureEntry",
    "ClosureReport",
    "MeanFieldContext",
    "Monomial",
    "OperatorExpr",
    "Reducer",
    "antinormal_order",
    "commutator_residual",
    "commute",
    "default_cutoffs",
    "fock_matrix",
    "identity_residual",
    "mean_field_reduce",
    "normal_order",
    "parse_operator",
    "safe_indices",
    "standard_aliases",
    "verify_closure",
]
