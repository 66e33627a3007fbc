"""
User profiles and their on-disk store.
"""

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, Mapping, Optional, Union

from ..errors import AuthRequired
from ..taxonomy import resolve_category

if TYPE_CHECKING:
    from ..security.gate import Session

logger = logging.getLogger(__name__)

CLICK = "click"

# medical_info key a user can set to demand a minimum site assurance level
SENSITIVITY_KEY = "data_sensitivity"


class FeedbackKind(Enum):
    EXPLICIT = "EXPLICIT"
    IMPLICIT = "IMPLICIT"


def clamp_weight(value: float) -> float:
    return round(min(1.0, max(0.0, float(value))), 6)


@dataclass(frozen=True)
class FeedbackEvent:
    """A rating (explicit) or a click marker (implicit) on a delivered record."""

    kind: FeedbackKind
    record_id: str
    signal: Union[int, str]
    timestamp: float = field(default_factory=time.time)

    def __post_init__(self) -> None:
        if self.kind is FeedbackKind.EXPLICIT and self.signal not in (-1, 0, 1):
            raise ValueError(f"explicit feedback needs a rating in -1..1, got {self.signal!r}")
        if self.kind is FeedbackKind.IMPLICIT and self.signal != CLICK:
            raise ValueError(f"implicit feedback needs the {CLICK!r} marker, got {self.signal!r}")

    @classmethod
    def rating(cls, record_id: str, value: int) -> "FeedbackEvent":
        return cls(FeedbackKind.EXPLICIT, record_id, int(value))

    @classmethod
    def click(cls, record_id: str) -> "FeedbackEvent":
        return cls(FeedbackKind.IMPLICIT, record_id, CLICK)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "record_id": self.record_id,
            "signal": self.signal,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FeedbackEvent":
        return cls(
            kind=FeedbackKind(data["kind"]),
            record_id=str(data["record_id"]),
            signal=data["signal"],
            timestamp=float(data.get("timestamp", 0.0)),
        )


def _normalize_preferences(preferences: Mapping[str, Any]) -> dict[str, float]:
    return {resolve_category(k): clamp_weight(v) for k, v in preferences.items()}


@dataclass
class UserProfile:
    """What the platform knows about one user."""

    user_id: str
    common_info: dict[str, str] = field(default_factory=dict)
    medical_info: dict[str, str] = field(default_factory=dict)
    health_conditions: list[str] = field(default_factory=list)
    preferences: dict[str, float] = field(default_factory=dict)
    feedback_history: list[FeedbackEvent] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.preferences = _normalize_preferences(self.preferences)

    def is_empty(self) -> bool:
        return not (
            self.common_info
            or self.medical_info
            or self.health_conditions
            or self.preferences
            or self.feedback_history
        )

    def weight(self, category: str) -> float:
        return self.preferences.get(category, 0.0)

    def required_assurance(self, default: int) -> int:
        """Assurance level demanded by the user's declared data sensitivity."""
        value = self.medical_info.get(SENSITIVITY_KEY, "")
        try:
            level = int(value)
        except (TypeError, ValueError):
            return default
        return level if 0 <= level <= 3 else default

    def private_values(self) -> list[str]:
        """Values that must never leave the platform."""
        return [v for v in (*self.common_info.values(), *self.medical_info.values()) if v]

    def to_dict(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "common_info": dict(self.common_info),
            "medical_info": dict(self.medical_info),
            "health_conditions": list(self.health_conditions),
            "preferences": dict(sorted(self.preferences.items())),
            "feedback_history": [e.to_dict() for e in self.feedback_history],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "UserProfile":
        return cls(
            user_id=str(data["user_id"]),
            common_info={str(k): str(v) for k, v in data.get("common_info", {}).items()},
            medical_info={str(k): str(v) for k, v in data.get("medical_info", {}).items()},
            health_conditions=[str(c) for c in data.get("health_conditions", [])],
            preferences=dict(data.get("preferences", {})),
            feedback_history=[FeedbackEvent.from_dict(e) for e in data.get("feedback_history", [])],
        )


def _as_list(value: Any) -> list[str]:
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return [str(v).strip() for v in value if str(v).strip()]


def apply_form(profile: UserProfile, form: Mapping[str, Any]) -> UserProfile:
    """
    Overlay a profile form. Sections present in the form replace the stored
    ones; absent sections are kept.

    Raises:
        ValueError: a preference names an unknown category
    """
    updated = replace(profile)
    if "common_info" in form:
        updated.common_info = {str(k): str(v) for k, v in dict(form["common_info"]).items()}
    if "medical_info" in form:
        updated.medical_info = {str(k): str(v) for k, v in dict(form["medical_info"]).items()}
    if "health_conditions" in form:
        updated.health_conditions = _as_list(form["health_conditions"])
    if "preferences" in form:
        updated.preferences = _normalize_preferences(dict(form["preferences"]))
    return updated


class ProfileStore:
    """
    One JSON document per user under a directory.

    File names are a hash of the user id. Writes replace the whole document
    atomically and are serialized per user.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._locks_guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def _path(self, user_id: str) -> Path:
        digest = hashlib.sha256(user_id.encode("utf-8")).hexdigest()
        return self.directory / f"{digest}.json"

    def _lock(self, user_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(user_id, threading.Lock())

    def load(self, user_id: str) -> Optional[UserProfile]:
        path = self._path(user_id)
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as f:
            return UserProfile.from_dict(json.load(f))

    def get(self, user_id: str) -> UserProfile:
        """Stored profile, or an empty one for a user without a document."""
        return self.load(user_id) or UserProfile(user_id=user_id)

    def _write(self, profile: UserProfile) -> None:
        path = self._path(profile.user_id)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".profile-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump(profile.to_dict(), f, indent=2, ensure_ascii=False)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def save(self, profile: UserProfile) -> None:
        with self._lock(profile.user_id):
            self._write(profile)

    def update(self, user_id: str, change: Callable[[UserProfile], UserProfile]) -> UserProfile:
        """Read-modify-write under the user's lock."""
        with self._lock(user_id):
            profile = change(self.get(user_id))
            self._write(profile)
        return profile


def create_or_update_profile(
    store: ProfileStore,
    session: Optional["Session"],
    form: Mapping[str, Any],
) -> UserProfile:
    """
    Fill in or change the profile of the session's user.

    Raises:
        AuthRequired: no live session
    """
    if session is None or not session.is_live():
        raise AuthRequired()
    profile = store.update(session.user_id, lambda p: apply_form(p, form))
    logger.debug("Profile updated (%d preference weights)", len(profile.preferences))
    return profile
