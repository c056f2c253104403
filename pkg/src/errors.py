"""Exception hierarchy shared by every subpackage.

Library code raises these; the command-line driver catches them and maps
them to exit codes.
"""

from typing import Dict, Optional


class SimplexDirectionsError(Exception):
    """Root of all errors raised by this package."""


class DomainError(SimplexDirectionsError, ValueError):
    """An input violates a documented precondition."""


class NumericError(SimplexDirectionsError, ArithmeticError):
    """A numerical routine failed (factorization, overflow, non-finite values).

    Attributes:
        condition: Optional reciprocal condition estimate of the offending matrix.
    """

    def __init__(self, message: str, condition: Optional[float] = None):
        super().__init__(message)
        self.condition = condition


class DegenerateMovementError(DomainError):
    """Start and end compositions coincide, so no direction exists."""


class AntipodalMovementError(DomainError):
    """End composition sits at the antipode of the start frame; direction undefined."""


class DatasetFormatError(DomainError):
    """A dataset file could not be parsed.

    Attributes:
        line: 1-based line number in the source file (header is line 1), if known.
    """

    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line = line


class ChainAbortedError(NumericError):
    """A sampler stopped on a numerical failure.

    Attributes:
        partial_chain: The draws kept before the failure, or None.
        chain_index: Position of the aborted chain in a multi-chain run, if known.
        completed: Chains of the same run that finished, keyed by position.
    """

    def __init__(self, message: str, partial_chain=None, chain_index: Optional[int] = None, completed: Optional[Dict] = None):
        super().__init__(message)
        self.partial_chain = partial_chain
        self.chain_index = chain_index
        self.completed = completed or {}
