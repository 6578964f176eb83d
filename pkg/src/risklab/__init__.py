"""Minimal investment risk of mean-variance portfolios on random return ensembles."""

from risklab.errors import (
    ConstraintError,
    ConvergenceError,
    DomainError,
    ParseError,
    RisklabError,
    SingularError,
)

__version__ = "0.1.0"

__all__ = [
    "ConstraintError",
    "ConvergenceError",
    "DomainError",
    "ParseError",
    "RisklabError",
    "SingularError",
    "__version__",
]
