"""Error hierarchy and its exit codes."""

import pytest

from medsearch.errors import (
    EXIT_CODES,
    AuthFailed,
    EmptyQuery,
    FetchError,
    MedSearchError,
    MigrationAborted,
    PlatformError,
    ServeError,
    error_from_report,
)


def test_exit_codes_are_distinct_per_family():
    codes = [code for name, code in EXIT_CODES.items() if name != "ok"]
    assert len(codes) == len(set(codes))
    assert EXIT_CODES["ok"] == 0
    assert FetchError.exit_code == ServeError.exit_code == 7
    assert MigrationAborted.exit_code == PlatformError.exit_code == 10


@pytest.mark.parametrize(
    "name, message, expected",
    [
        ("FetchError", "site down", FetchError),
        ("MigrationAborted", "agent died", MigrationAborted),
        ("EmptyQuery", "", EmptyQuery),
    ],
)
def test_errors_are_rebuilt_by_name(name, message, expected):
    error = error_from_report(name, message)
    assert type(error) is expected
    if message:
        assert str(error) == message


def test_auth_failure_never_carries_detail():
    error = error_from_report("AuthFailed", "wrong IP for alice")
    assert isinstance(error, AuthFailed)
    assert str(error) == "authentication failed"


def test_unknown_names_fall_back_to_the_base_class():
    error = error_from_report("KeyError", "boom")
    assert type(error) is MedSearchError
    assert str(error) == "boom"
    assert str(error_from_report("KeyError", "")) == "KeyError"
