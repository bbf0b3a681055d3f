"""Exception hierarchy. Every error knows the CLI exit code it maps to."""

from typing import Optional, Tuple


class PGroupError(Exception):
    exit_code = 1


class GroupInputError(PGroupError, ValueError):
    """Bad user input: indices, files, orders, generating tuples."""

    exit_code = 1


class PresentationSyntaxError(GroupInputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class GroupAxiomError(GroupInputError):
    """A multiplication table that is not a group table."""

    def __init__(self, message: str, witness: Optional[Tuple[int, ...]] = None):
        if witness is not None:
            message = f"{message} (failing indices {witness})"
        super().__init__(message)
        self.witness = witness


class StructuralError(PGroupError, RuntimeError):
    """An operation was asked for something the group structure forbids."""

    exit_code = 1


class ResourceOverflowError(PGroupError, RuntimeError):
    """Coset limit or table cap exceeded."""

    exit_code = 3


class VerificationFailure(PGroupError, AssertionError):
    """A predicted fact disagrees with direct computation."""

    exit_code = 2

    def __init__(self, message: str, dump: str = ""):
        super().__init__(message if not dump else f"{message}\n{dump}")
        self.dump = dump
