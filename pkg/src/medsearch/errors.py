"""
Exception hierarchy.

Every error carries the process exit code the CLI maps it to, so the
exit-code table lives next to the errors themselves.
"""


class MedSearchError(Exception):
    """Base class for all medsearch errors."""

    exit_code = 1


# Configuration

class ConfigError(MedSearchError):
    """Invalid or missing configuration."""

    exit_code = 2


# Query pipeline

class EmptyQuery(MedSearchError):
    """Nothing left to search for after stopword removal."""

    exit_code = 3

    def __init__(self, message: str = "empty query after stopword removal"):
        super().__init__(message)


# Security gate

class AuthFailed(MedSearchError):
    """Login rejected. Deliberately carries no detail about the cause."""

    exit_code = 4

    def __init__(self) -> None:
        super().__init__("authentication failed")


class AuthRequired(MedSearchError):
    """Operation needs a live session."""

    exit_code = 5

    def __init__(self, message: str = "authentication required") -> None:
        super().__init__(message)


class SanitizationFailure(MedSearchError):
    """An identifier survived pseudonymization; the payload must not leave."""

    exit_code = 6


# Site transport and parsing

class FetchError(MedSearchError):
    """A site could not be reached."""

    exit_code = 7


class ServeError(MedSearchError):
    """The site service could not be started."""

    exit_code = 7


class ParseError(MedSearchError):
    """A site page did not have the expected structure."""

    exit_code = 8


# Personalization

class UnknownResult(MedSearchError):
    """Feedback references a record that was never delivered."""

    exit_code = 9


# Agent platform

class PlatformError(MedSearchError):
    """Base class for agent platform errors."""

    exit_code = 10


class NameTaken(PlatformError):
    """An agent with this name is already live."""


class AlreadyRegistered(PlatformError):
    """The (service type, owner) pair is already in the directory."""


class NoSuchLocation(PlatformError):
    """Migration target is not a platform location."""


class MigrationAborted(PlatformError):
    """The agent died while its state was in transfer."""


class UnknownAgent(PlatformError):
    """No agent with this id was ever spawned."""


EXIT_CODES = {
    "ok": 0,
    "unexpected": MedSearchError.exit_code,
    "config": ConfigError.exit_code,
    "empty_query": EmptyQuery.exit_code,
    "auth_failed": AuthFailed.exit_code,
    "auth_required": AuthRequired.exit_code,
    "sanitization": SanitizationFailure.exit_code,
    "transport": FetchError.exit_code,
    "parse": ParseError.exit_code,
    "unknown_result": UnknownResult.exit_code,
    "platform": PlatformError.exit_code,
}


def _subclasses(cls: type) -> list[type]:
    found = [cls]
    for sub in cls.__subclasses__():
        found.extend(_subclasses(sub))
    return found


def error_from_report(name: str, message: str) -> MedSearchError:
    """
    Rebuild an error reported across an agent message by its class name.

    Unknown names come back as a plain MedSearchError.
    """
    for cls in _subclasses(MedSearchError):
        if cls.__name__ != name:
            continue
        if cls is AuthFailed:
            return AuthFailed()
        return cls(message) if message else cls()
    return MedSearchError(message or name)
