"""Exception hierarchy shared by every stpgames module."""


class StpGamesError(Exception):
    """Base class for all library errors."""


class DimensionError(StpGamesError, ValueError):
    """Raised when shapes are incompatible or a result would exceed the entry cap."""


class GameFormatError(StpGamesError, ValueError):
    """Raised for malformed game data. ``field`` names the offending input field."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class NotASolutionError(StpGamesError):
    """Raised when a potential is requested from a vector that does not solve the WPE."""


class DegenerateGameError(StpGamesError):
    """Raised when weights cannot be identified or fall below the admissible floor."""


class SingularDesignError(StpGamesError):
    """Raised when the objective lies in the span of a player's non-strategic block."""
