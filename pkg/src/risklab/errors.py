"""Exception types shared across the package."""


class RisklabError(Exception):
    pass


class SingularError(RisklabError, ArithmeticError):
    """Raised when a covariance matrix is not positive definite.

    ``pivot`` is the zero-based index of the first rejected pivot, or None when
    the failure was detected without a factorization (e.g. p < N up front).
    """

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


class ConvergenceError(RisklabError, ArithmeticError):
    pass


class DomainError(RisklabError, ValueError):
    pass


class ConstraintError(RisklabError, ValueError):
    pass


class ParseError(RisklabError, ValueError):
    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column
