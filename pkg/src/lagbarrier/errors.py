"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument is malformed (zero direction, bad id, alpha <= 1, ...)."""


class DomainError(ValueError):
    """A point or body lies outside the region where an operation is defined."""


class PreconditionError(ValueError):
    """A mathematical hypothesis of a construction is violated."""


class NotFound(KeyError):
    """Requested registry entry does not exist."""


class ConsistencyError(RuntimeError):
    """Certified bounds contradict each other (lower > upper)."""

    def __init__(self, message, certificates=None):
        super().__init__(message)
        self.certificates = list(certificates or [])
