"""Exception taxonomy shared by all layers.

Errors that carry a mathematical witness (a residual, a singular pivot, an
unsolvable system) store it on the exception so reports can embed it.
"""


class NovikovError(Exception):
    """Base class for all library errors."""


class ContextMismatchError(NovikovError):
    """Operands belong to different ring/automorphism contexts."""


class NotAUnitError(NovikovError):
    """Inversion of a non-unit; ``witness`` describes the obstruction."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotInvertibleError(NovikovError):
    """A matrix/series is not invertible in the requested ring."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CapabilityError(NovikovError):
    """The operation is not supported over this base ring."""


class FlavorError(NovikovError):
    """Operation applied to a series flavor it is not defined for."""


class PrecisionError(NovikovError):
    """Precision contract violated (escalation or too-small window)."""


class SchemaError(NovikovError):
    """Problem-file validation failure; ``path`` is a JSON-pointer string."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class InvariantViolationError(NovikovError):
    """An internal identity that must hold by construction failed (a bug)."""


class NoWitnessError(NovikovError):
    """No noninjectivity witness exists (commutative context)."""


class Cancelled(NovikovError):
    """Long-running verification was cancelled by the caller."""
