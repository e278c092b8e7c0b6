"""
Exception types shared by the services, the CLI and the HTTP routes.

Everything derives from ValueError so callers that only care about "bad
input" can catch one type; the CLI and routes map the subclasses to exit
codes and status codes.
"""

from typing import Optional


class BracketError(ValueError):
    """Base class for every domain error raised by this project"""


class PolynomialParseError(BracketError):
    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DimensionMismatchError(BracketError):
    pass


class ArityError(BracketError):
    pass


class MissingMetadataError(BracketError):
    pass


class NotCertifiedError(BracketError):
    pass


class NotClosedError(BracketError):
    pass


class CertificationError(BracketError):
    pass


class ConfigError(BracketError):
    pass


class BudgetExceededError(BracketError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"Verification needs {required} tuples but the budget is {budget}; "
            f"raise --budget / MAX_TUPLES or use --sample for a non-certifying run"
        )
