"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class MissingMomentError(KeyError):
    """A required moment entry is absent from a moment table."""


class CapacityError(ValueError):
    """A request exceeds a combinatorial size cap."""


class NumericError(RuntimeError):
    """A numerical routine failed to meet its accuracy contract."""
