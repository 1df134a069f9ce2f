"""
Templates, similarity scoring, the liveness decision and the user profile store.
"""

from gesturelive.errors import GestureLiveError


class MatchingError(GestureLiveError):
    """Base class for matching errors."""

    pass


class UndefinedCorrelationError(MatchingError):
    """Raised when a correlation is requested for a constant sequence."""

    pass


class EnrollmentError(MatchingError):
    """Raised when enrollment trials cannot form a template."""

    pass


class ScoringError(MatchingError):
    """Raised when a test utterance cannot be scored against a template."""

    pass


class ProfileError(MatchingError):
    """Raised when a user profile is missing, invalid or cannot be stored."""

    pass
