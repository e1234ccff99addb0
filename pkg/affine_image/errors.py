"""Exception hierarchy for the affine-image engine and CLI."""

from typing import Optional


class AffineImageError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AffineImageError, ValueError):
    """An operation received values from the wrong ring or outside its domain."""


class DegreeUndefinedError(DomainError):
    """Degree or leading term of the zero polynomial was requested."""


class UnsupportedOperationError(AffineImageError):
    """The requested computation is outside what the engine implements."""


class GenericityError(AffineImageError):
    """A randomized step exhausted its retry budget; re-seed and retry."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class RoundLimitExceededError(AffineImageError):
    """The image recursion did not terminate within its round limit."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class NoGeneratorError(AffineImageError):
    """A coordinate projection of the target is dominant; no fixed hypersurface."""


class GroupLawError(DomainError):
    """An explicit action formula is not an additive group action."""

    def __init__(self, message: str, identity: str):
        super().__init__(f"{message}: {identity}")
        self.identity = identity


class PurePowerError(DomainError):
    """A target generator lacks the top-degree pure power of the last variable."""


class ParseError(DomainError):
    """Polynomial source text could not be parsed."""

    def __init__(
        self, message: str, line: int, column: int, source: Optional[str] = None
    ):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column
        self.source = source


class ProblemFileError(DomainError):
    """A problem file is malformed or carries unknown keys."""
