"""
Registered users and the IP addresses they may log in from.
"""

import json
import logging
import os
import tempfile
import threading
from pathlib import Path
from typing import Iterable

from ..errors import ConfigError
from .gate import normalize_ip

logger = logging.getLogger(__name__)

USERS_FILENAME = "users.json"


class UserDirectory:
    """Exact-match IP allowlist per user, persisted as one JSON document."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._users: dict[str, set[str]] = {}
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        try:
            with open(self.path, "r", encoding="utf-8") as f:
                data = json.load(f)
            self._users = {
                str(user): {normalize_ip(ip) for ip in entry.get("allowed_ips", [])}
                for user, entry in data.get("users", {}).items()
            }
        except (OSError, ValueError, AttributeError) as e:
            raise ConfigError(f"invalid user directory {self.path}: {e}") from e

    def _save_locked(self) -> None:
        if self.path is None:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        data = {
            "users": {u: {"allowed_ips": sorted(ips)} for u, ips in sorted(self._users.items())}
        }
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".users-", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2)
        os.replace(tmp, self.path)

    def register(self, user_id: str, allowed_ips: Iterable[str]) -> None:
        """
        Add a user or extend their allowlist.

        Raises:
            ValueError: empty user id, no IPs or an invalid IP
        """
        if not user_id.strip():
            raise ValueError("user id must not be empty")
        ips = {normalize_ip(ip) for ip in allowed_ips}
        if not ips:
            raise ValueError("at least one allowed IP is required")
        with self._lock:
            self._users.setdefault(user_id, set()).update(ips)
            self._save_locked()
        logger.info("Registered user with %d allowed IPs", len(ips))

    def remove(self, user_id: str) -> bool:
        with self._lock:
            removed = self._users.pop(user_id, None) is not None
            if removed:
                self._save_locked()
        return removed

    def is_registered(self, user_id: str) -> bool:
        with self._lock:
            return user_id in self._users

    def is_allowed(self, user_id: str, ip: str) -> bool:
        with self._lock:
            return ip in self._users.get(user_id, ())

    def __len__(self) -> int:
        with self._lock:
            return len(self._users)
