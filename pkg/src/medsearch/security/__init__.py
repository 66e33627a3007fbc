"""Authentication, record keys, site assurance and outbound sanitization."""

from .gate import (
    DEFAULT_SESSION_TTL_S,
    AssuranceLevel,
    Credential,
    RecordKey,
    Session,
    SessionManager,
    allowed_locations,
    check_assurance,
    derive_record_key,
    new_search_nonce,
)
from .sanitize import (
    build_site_payload,
    private_needles,
    pseudonymize_outbound,
    scan_payload,
)
from .users import UserDirectory

__all__ = [
    "DEFAULT_SESSION_TTL_S",
    "AssuranceLevel",
    "Credential",
    "RecordKey",
    "Session",
    "SessionManager",
    "UserDirectory",
    "allowed_locations",
    "build_site_payload",
    "check_assurance",
    "derive_record_key",
    "new_search_nonce",
    "private_needles",
    "pseudonymize_outbound",
    "scan_payload",
]
