"""Exception types shared across the engine."""

from __future__ import annotations


class TxlogError(Exception):
    """Base class for all engine errors."""


class ParseError(TxlogError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ValidationError(TxlogError):
    """Raised when a program with error diagnostics is loaded into a store."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = list(diagnostics)


class InstantiationError(TxlogError):
    """A built-in test or elementary update was executed on a non-ground term."""


class RoleError(TxlogError):
    """An operation targeted a predicate with the wrong role, e.g. del on a derived predicate."""


class UnknownPredicateError(TxlogError):
    """A call named a predicate the program gives no meaning to."""


class UnknownSignatureError(TxlogError):
    """A state signature was not minted by this engine's signer."""


class BudgetExceededError(TxlogError):
    """Proof search exceeded its step budget (exit code 2 territory)."""

    def __init__(self, message: str, oldest_call: str | None = None):
        super().__init__(message)
        self.oldest_call = oldest_call
