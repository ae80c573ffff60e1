"""
Exception hierarchy for the hexufs evaluator.

Every error raised on purpose by the package derives from HexError, so the
CLI and the HTTP service can turn any of them into a diagnostic.
"""

from typing import Optional


class HexError(Exception):
    """Base class for all evaluator errors."""


class ParseError(HexError):
    """Syntax or well-formedness error in program text."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class NamingCollisionError(HexError):
    """A generated atom name clashes with a name already used by the program."""


class UnsafeVariableError(HexError):
    def __init__(self, rule: str, variable: str):
        self.rule = rule
        self.variable = variable
        super().__init__(f"unsafe variable {variable} in rule: {rule}")


class OracleError(HexError):
    """Failure while binding or evaluating an external source."""


class UnknownOracleError(OracleError):
    pass


class OracleSignatureError(OracleError):
    pass


class DuplicateOracleError(OracleError):
    pass


class EnumerationNotSupportedError(OracleError):
    pass


class TableOracleFormatError(OracleError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapExceededError(HexError):
    """A desk-scale size cap was exceeded."""

    def __init__(self, what: str, size: int, cap: int):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__(f"{what} has {size} atoms, cap is {cap}")


class PreconditionError(HexError):
    """An operation was called outside its documented precondition."""


class InvalidInstanceSpecError(HexError):
    pass
