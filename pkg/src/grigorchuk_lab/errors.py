"""Exception hierarchy shared by the services, the CLI and the API."""


class GrigorchukLabError(Exception):
    """Base class for every error raised on purpose by this package."""


class OmegaParseError(GrigorchukLabError, ValueError):
    """The omega text could not be parsed into preperiod and period."""


class LevelMismatchError(GrigorchukLabError):
    """Two elements live in different groups (omega or level differ)."""


class ContractionError(GrigorchukLabError):
    """The identity recursion stopped contracting or hit its depth guard."""


class PreconditionError(GrigorchukLabError):
    """An operation was called outside its documented domain."""


class FrConditionError(GrigorchukLabError):
    """Assumption Fr(D) is required but the string violates it."""

    def __init__(self, message: str, block: int | None = None):
        super().__init__(message)
        self.block = block


class CapacityError(GrigorchukLabError):
    """A configured cap or search bound was exceeded."""
