"""Exception types shared across the package."""


class EnumerationTooLarge(ValueError):
    """Raised when a requested enumeration exceeds the configured cap."""


class InternalConsistencyError(RuntimeError):
    """Two routes that must agree exactly (or to stated tolerance) disagreed."""


class IdentityViolation(RuntimeError):
    """An identity that must hold exactly failed to hold."""


class TruncationError(RuntimeError):
    """A series truncation did not converge within the allowed number of terms."""

    def __init__(self, message: str, last_term: float, terms_used: int):
        super().__init__(message)
        self.last_term = last_term
        self.terms_used = terms_used
