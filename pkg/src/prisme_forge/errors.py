"""Exception hierarchy shared across the pipeline."""


class PrismeError(Exception):
    """Base class for all pipeline errors."""


class ValidationError(PrismeError):
    """Bad inputs or configuration; maps to CLI exit code 2."""


class ConfigurationError(ValidationError):
    """A required resource (profile set, backend, config key) is missing."""


class RejectedUrl(PrismeError):
    """A URL that cannot be processed; callers skip it."""


class FetchError(PrismeError):
    """Network-level failure while fetching a URL."""


class RobotsFetchError(PrismeError):
    """robots.txt could not be retrieved (non-404 failure); the domain is skipped."""
