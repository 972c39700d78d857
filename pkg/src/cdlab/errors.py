"""Exception types shared across the package.

Parameter, domain and evaluation problems are plain ``ValueError`` subclasses
so callers can catch them generically; numerical breakdowns derive from
``ArithmeticError``.
"""

from __future__ import annotations


class ParameterError(ValueError):
    """A model or method parameter is outside its admissible range."""


class DomainError(ValueError):
    """An evaluation point lies outside the function's domain."""


class EvaluationError(ValueError):
    """A user-supplied function returned a non-finite value."""


class ValidityError(ValueError):
    """A method's theoretical precondition is violated.

    ``threshold`` carries the bound that was not met, when there is one.
    """

    def __init__(self, message: str, threshold: float | None = None):
        super().__init__(message)
        self.threshold = threshold


class ContractError(ValueError):
    """Input does not have the structure a routine requires."""


class SingularMatrixError(ArithmeticError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class InfSupError(ArithmeticError):
    """Schur complement of a saddle point system could not be factorized."""


class ToleranceNotMet(ArithmeticError):
    def __init__(self, message: str, last: float, previous: float):
        super().__init__(message)
        self.last = last
        self.previous = previous
