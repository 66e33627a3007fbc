"""Log-in authority, record keys, assurance filtering and outbound sanitization."""

import threading

import pytest

from medsearch.errors import AuthFailed, AuthRequired, ConfigError, SanitizationFailure
from medsearch.personalization import UserProfile
from medsearch.query import annotate
from medsearch.security import (
    AssuranceLevel,
    Credential,
    SessionManager,
    UserDirectory,
    allowed_locations,
    build_site_payload,
    derive_record_key,
    new_search_nonce,
    pseudonymize_outbound,
    scan_payload,
)
from medsearch.security.sanitize import PAYLOAD_KEYS, RECORD_KEY

from conftest import RESPIRATORY, SECRET, USER, USER_IP


class FakeClock:
    def __init__(self, now: float = 1000.0):
        self.now = now

    def __call__(self) -> float:
        return self.now


# ============================================================================
# Sessions
# ============================================================================


def test_login_from_an_allowed_address(sessions):
    session = sessions.login(Credential(USER, USER_IP))
    assert session.user_id == USER
    assert len(session.token) == 32
    assert sessions.require(session.token) is session


def test_login_failures_look_alike(sessions):
    with pytest.raises(AuthFailed) as wrong_ip:
        sessions.login(Credential(USER, "10.0.0.8"))
    with pytest.raises(AuthFailed) as unknown:
        sessions.login(Credential("mallory", USER_IP))
    with pytest.raises(AuthFailed):
        sessions.login(Credential(USER, "not-an-ip"))
    assert str(wrong_ip.value) == str(unknown.value)


def test_addresses_are_normalized(users):
    users.register("bob", ["::1"])
    sessions = SessionManager(users)
    assert sessions.login(Credential("bob", "0:0:0:0:0:0:0:1")).source_ip == "::1"


def test_credential_needs_both_parts():
    with pytest.raises(ValueError):
        Credential("", USER_IP)


def test_require_rejects_missing_and_unknown_tokens(sessions):
    with pytest.raises(AuthRequired):
        sessions.require(None)
    with pytest.raises(AuthRequired):
        sessions.require("0" * 32)


def test_sessions_expire(users):
    clock = FakeClock()
    sessions = SessionManager(users, ttl_s=60, clock=clock)
    session = sessions.login(Credential(USER, USER_IP))

    clock.now += 59
    assert sessions.require(session.token) is session
    clock.now += 1
    with pytest.raises(AuthRequired, match="expired"):
        sessions.require(session.token)
    assert sessions.live_sessions() == 0


def test_logout(sessions, session):
    assert sessions.logout(session.token)
    assert not sessions.logout(session.token)
    with pytest.raises(AuthRequired):
        sessions.require(session.token)


# ============================================================================
# Record keys and assurance
# ============================================================================


def test_record_keys_are_fresh_per_search():
    keys = {derive_record_key(SECRET, USER, new_search_nonce()).key for _ in range(10_000)}
    assert len(keys) == 10_000


def test_record_keys_are_deterministic_and_opaque():
    nonce = bytes(16)
    key = derive_record_key(SECRET, USER, nonce)
    assert key == derive_record_key(SECRET, USER, nonce)
    assert key.key != derive_record_key(SECRET, "bob", nonce).key
    assert key.key != derive_record_key(bytes(32), USER, nonce).key
    assert key.search_nonce == "00" * 16
    assert USER not in key.key


def test_assurance_filter_shrinks_as_the_requirement_rises(corpus):
    locations = corpus.locations()
    allowed = [
        {loc.location_id for loc in allowed_locations(locations, level)}
        for level in AssuranceLevel
    ]

    assert [len(a) for a in allowed] == [4, 4, 3, 2]
    for looser, stricter in zip(allowed, allowed[1:]):
        assert stricter <= looser
    assert allowed[-1] == {"respiratory-01", "skin-01"}


# ============================================================================
# Sanitization
# ============================================================================


def test_site_payload_carries_only_query_content(dictionary, session):
    annotated = annotate("influenza", dictionary)
    key = derive_record_key(SECRET, USER, bytes(16))
    payload = build_site_payload(annotated, ["influenza", "flu"], key, 2)

    assert set(payload) == PAYLOAD_KEYS
    assert payload["categories"] == [RESPIRATORY]
    assert pseudonymize_outbound(payload, session, record_key=key) == payload


def test_identifiers_are_stripped(session):
    profile = UserProfile(
        user_id=USER,
        common_info={"name": "Alice Smith"},
        medical_info={"blood_type": "O"},
    )
    key = derive_record_key(SECRET, USER, bytes(16))
    payload = {
        "user_id": USER,
        "common_info": profile.common_info,
        "search_terms": ["fever", USER, "fever for alice smith", "type o blood"],
        "note": f"token={session.token} from {session.source_ip}",
        "categories": [RESPIRATORY],
    }

    clean = pseudonymize_outbound(payload, session, profile, record_key=key)

    assert "user_id" not in clean and "common_info" not in clean
    assert clean["search_terms"] == ["fever", "fever for", "type blood"]
    assert clean["note"] == "token= from"
    assert clean["categories"] == [RESPIRATORY]
    assert clean[RECORD_KEY] == key.key
    assert scan_payload(clean, [USER, session.token, "alice smith", "o"]) == []


def test_short_needles_match_whole_words_only(session):
    profile = UserProfile(user_id=USER, medical_info={"blood_type": "O"})
    clean = pseudonymize_outbound({"search_terms": ["cough"]}, session, profile)
    assert clean["search_terms"] == ["cough"]


def test_scan_reports_paths():
    payload = {"a": ["x", "Alice Smith"], "alice-notes": 1, RECORD_KEY: "alice"}
    assert scan_payload(payload, ["alice"]) == ["$.a[1]", "$.alice-notes"]


def test_unsanitizable_payload_fails_closed(session):
    with pytest.raises(SanitizationFailure):
        pseudonymize_outbound({"lock": threading.Lock()}, session)


# ============================================================================
# User directory
# ============================================================================


def test_user_directory_persists(data_dir):
    path = data_dir / "users.json"
    directory = UserDirectory(path)
    directory.register(USER, [USER_IP])
    directory.register(USER, ["10.0.0.9"])

    reopened = UserDirectory(path)
    assert reopened.is_allowed(USER, "10.0.0.9")
    assert reopened.is_allowed(USER, USER_IP)
    assert len(reopened) == 1

    assert reopened.remove(USER)
    assert not UserDirectory(path).is_registered(USER)


def test_user_directory_validation(data_dir):
    directory = UserDirectory()
    with pytest.raises(ValueError):
        directory.register(USER, [])
    with pytest.raises(ValueError):
        directory.register(USER, ["300.1.1.1"])
    with pytest.raises(ValueError):
        directory.register("  ", [USER_IP])

    broken = data_dir / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        UserDirectory(broken)
