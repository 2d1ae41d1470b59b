"""Exception hierarchy shared by all modules.

Two families matter operationally: ``SchemaError`` for malformed input data
(the CLI maps it to exit code 2) and ``PreconditionError`` for mathematically
ill-posed requests on well-formed data (exit code 1).
"""


class QsetsError(Exception):
    """Base class for all library errors."""


class SchemaError(QsetsError):
    """Malformed serialized input (bad JSON shape, missing field, bad value)."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class PreconditionError(QsetsError):
    """A mathematical precondition of an operation is violated."""


class ShapeMismatchError(PreconditionError):
    """Operands have incompatible dimensions."""


class SetMismatchError(PreconditionError):
    """Operands live over incompatible quantum sets."""
