"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class ResourceError(RuntimeError):
    """Raised when a problem exceeds a configured size cap."""

    def __init__(self, message: str, cap: int | None = None) -> None:
        super().__init__(message)
        self.cap = cap
