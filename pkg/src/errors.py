"""Actionable and technical error classes."""


class ActionableError(Exception):
    """An error the user can act upon to resolve (e.g. a bad parameter)."""

    def __init__(self, message: str, code: str = "ACTIONABLE_ERROR") -> None:
        super().__init__(message)
        self.code = code


class InvalidArgumentError(ActionableError):
    """A precondition of an operation is violated by its input."""

    def __init__(self, message: str, code: str = "INVALID_ARGUMENT") -> None:
        super().__init__(message, code)


class ResourceLimitError(ActionableError):
    """A requested resolution or sample count exceeds the configured caps."""

    def __init__(self, message: str, code: str = "RESOURCE_LIMIT") -> None:
        super().__init__(message, code)


class TechnicalError(Exception):
    """An internal fault that is not caused by the user's input."""

    def __init__(self, message: str, code: str = "INTERNAL_ERROR") -> None:
        super().__init__(message)
        self.code = code


class InternalConsistencyError(TechnicalError):
    """A numerical invariant failed (non-Hermitian Gram, broken post-assertion)."""

    def __init__(self, message: str, code: str = "INTERNAL_CONSISTENCY") -> None:
        super().__init__(message, code)
