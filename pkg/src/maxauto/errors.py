"""Shared exception types."""


class MaxautoError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MaxautoError):
    """Malformed or mismatched input (bad letter, missing atom, parse error)."""


class ValidationError(MaxautoError):
    """Operation attempted on an automaton that fails validation."""


class BudgetError(MaxautoError):
    """A configured resource budget (state count, guard count) was exceeded."""


class ParseError(InputError):
    """Syntax error; carries a position when one is known."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
