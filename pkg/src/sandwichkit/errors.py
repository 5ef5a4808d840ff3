class SandwichKitError(Exception):
    """Base class for all toolkit errors."""


class BudgetError(SandwichKitError):
    """A size or search limit was exceeded."""


class DomainMismatch(SandwichKitError, ValueError):
    """Two morphisms were composed with x.dst != y.src."""


class PreconditionError(SandwichKitError, ValueError):
    pass


class Unsupported(SandwichKitError):
    """The operation is undefined for this input (e.g. a non-regular semigroup)."""
