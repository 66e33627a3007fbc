"""
Log-in authority, sessions, per-search record keys and site assurance.
"""

import hashlib
import hmac
import ipaddress
import logging
import secrets
import threading
import time
from dataclasses import dataclass, field
from enum import IntEnum
from typing import TYPE_CHECKING, Callable, Iterable, Optional

from ..errors import AuthFailed, AuthRequired

if TYPE_CHECKING:
    from ..platform.messages import Location
    from ..sites.corpus import SiteManifest
    from .users import UserDirectory

logger = logging.getLogger(__name__)

DEFAULT_SESSION_TTL_S = 30 * 60
TOKEN_BYTES = 16
NONCE_BYTES = 16


class AssuranceLevel(IntEnum):
    """Identification-assurance rank certified for a site."""

    NONE = 0
    LOW = 1
    MEDIUM = 2
    HIGH = 3


def check_assurance(site: "SiteManifest", required: int) -> bool:
    """Allow a site iff its assurance level reaches the required one."""
    return AssuranceLevel(site.assurance_level) >= AssuranceLevel(required)


def allowed_locations(locations: Iterable["Location"], required: int) -> list["Location"]:
    return [loc for loc in locations if check_assurance(loc.site, required)]


def normalize_ip(value: str) -> str:
    return str(ipaddress.ip_address(value.strip()))


@dataclass(frozen=True)
class Credential:
    user_id: str
    source_ip: str

    def __post_init__(self) -> None:
        if not self.user_id or not self.source_ip:
            raise ValueError("credential needs a user id and a source IP")


@dataclass
class Session:
    """A logged-in user. ``expires_at`` is on the monotonic clock."""

    token: str
    user_id: str
    source_ip: str
    expires_at: float
    clock: Callable[[], float] = field(default=time.monotonic, repr=False, compare=False)

    def is_live(self, now: Optional[float] = None) -> bool:
        return (self.clock() if now is None else now) < self.expires_at


@dataclass(frozen=True)
class RecordKey:
    """Per-search pseudonymous index key (hex)."""

    key: str
    search_nonce: str


def new_search_nonce() -> bytes:
    return secrets.token_bytes(NONCE_BYTES)


def derive_record_key(secret: bytes, user_id: str, search_nonce: bytes) -> RecordKey:
    """HMAC-SHA256 over the user id and the search nonce, keyed by the platform secret."""
    message = user_id.encode("utf-8") + b"\x00" + search_nonce
    digest = hmac.new(secret, message, hashlib.sha256).hexdigest()
    return RecordKey(key=digest, search_nonce=search_nonce.hex())


class SessionManager:
    """Issues and checks sessions against a user directory."""

    def __init__(
        self,
        directory: "UserDirectory",
        ttl_s: float = DEFAULT_SESSION_TTL_S,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.directory = directory
        self.ttl_s = ttl_s
        self.clock = clock
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def login(self, credential: Credential) -> Session:
        """
        Open a session for a registered user calling from an allowed IP.

        Raises:
            AuthFailed: unknown user or IP not allowed (same error either way)
        """
        try:
            ip = normalize_ip(credential.source_ip)
        except ValueError:
            raise AuthFailed() from None
        if not self.directory.is_allowed(credential.user_id, ip):
            logger.info("Login rejected")
            raise AuthFailed()

        with self._lock:
            self._purge_locked()
            token = secrets.token_hex(TOKEN_BYTES)
            while token in self._sessions:
                token = secrets.token_hex(TOKEN_BYTES)
            session = Session(
                token=token,
                user_id=credential.user_id,
                source_ip=ip,
                expires_at=self.clock() + self.ttl_s,
                clock=self.clock,
            )
            self._sessions[token] = session
        logger.info("Session opened (%d live)", len(self._sessions))
        return session

    def logout(self, token: str) -> bool:
        with self._lock:
            return self._sessions.pop(token, None) is not None

    def require(self, token: Optional[str]) -> Session:
        """
        The live session for a token.

        Raises:
            AuthRequired: missing, unknown or expired token
        """
        if not token:
            raise AuthRequired()
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                raise AuthRequired()
            if not session.is_live():
                del self._sessions[token]
                raise AuthRequired("session expired")
            return session

    def live_sessions(self) -> int:
        with self._lock:
            self._purge_locked()
            return len(self._sessions)

    def _purge_locked(self) -> None:
        now = self.clock()
        for token in [t for t, s in self._sessions.items() if not s.is_live(now)]:
            del self._sessions[token]
