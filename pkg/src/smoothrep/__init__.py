"""Squarefree smooth representatives of residue classes and Euclidean prime generators."""

from smoothrep.errors import (
    CapExceeded,
    FactorBudgetExceeded,
    NonResidue,
    NotFound,
    NotInvertible,
    NotRepresentable,
    SearchExhausted,
    SmoothRepError,
    UsageError,
    VerificationFailure,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "FactorBudgetExceeded",
    "NonResidue",
    "NotFound",
    "NotInvertible",
    "NotRepresentable",
    "SearchExhausted",
    "SmoothRepError",
    "UsageError",
    "VerificationFailure",
]
