"""Exception hierarchy shared across the package."""


class SquashError(Exception):
    """Base class for all errors raised by this package."""


class LabelClash(SquashError):
    """Subsystem labels collide or label groups overlap."""


class UnknownSystem(SquashError):
    """A referenced label does not exist in the layout."""


class ShapeError(SquashError):
    """Dimension or layout mismatch between operands."""


class InvariantViolation(SquashError):
    """A typed invariant (hermiticity, positivity, normalization, ...) failed."""


class DomainError(SquashError):
    """Argument outside the mathematical domain of a function."""
