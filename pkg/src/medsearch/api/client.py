"""
Client for the platform API of a running ``medsearch serve`` process.
"""

import logging
from typing import Any, Optional

import requests

from ..errors import FetchError, error_from_report
from ..personalization.profile import UserProfile
from ..search.system import SearchResult
from .routes import TOKEN_HEADER

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 300.0


class PlatformClient:
    """Wrapper around a requests session bound to one server."""

    def __init__(
        self,
        base_url: str,
        token: Optional[str] = None,
        timeout: float = DEFAULT_TIMEOUT_S,
    ):
        """
        Initialize the client.

        Args:
            base_url: Server address, e.g. http://127.0.0.1:8642
            token: Session token sent with every request
            timeout: Per-request timeout in seconds
        """
        self.base_url = base_url.rstrip("/")
        self.token = token
        self.timeout = timeout
        self._session = requests.Session()

    def _call(self, method: str, path: str, body: Optional[dict] = None) -> dict[str, Any]:
        headers = {TOKEN_HEADER: self.token} if self.token else {}
        try:
            response = self._session.request(
                method,
                f"{self.base_url}{path}",
                json=body,
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as e:
            raise FetchError(f"cannot reach {self.base_url}: {e}") from e

        try:
            data = response.json()
        except ValueError:
            raise FetchError(f"{path}: HTTP {response.status_code}, not JSON") from None
        if response.status_code >= 400:
            if response.status_code == 422 and "error" not in data:
                raise ValueError(str(data.get("detail", "invalid request")))
            raise self._error(data)
        return data

    @staticmethod
    def _error(data: dict[str, Any]) -> Exception:
        if data.get("error") == "ValueError":
            return ValueError(data.get("message", ""))
        return error_from_report(data.get("error", ""), data.get("message", ""))

    def health(self) -> dict[str, Any]:
        return self._call("GET", "/api/health")

    def login(self, user_id: str, source_ip: Optional[str] = None) -> str:
        """
        Open a session and keep its token for later calls.

        Raises:
            AuthFailed: unknown user or address not allowed
        """
        data = self._call("POST", "/api/login", {"user_id": user_id, "source_ip": source_ip})
        self.token = data["token"]
        return self.token

    def logout(self) -> bool:
        return bool(self._call("POST", "/api/logout").get("logged_out"))

    def query(self, text: str, topology: Optional[str] = None) -> SearchResult:
        data = self._call("POST", "/api/query", {"text": text, "topology": topology})
        return SearchResult.from_dict(data)

    def profile(self) -> UserProfile:
        return UserProfile.from_dict(self._call("GET", "/api/profile"))

    def update_profile(self, form: dict[str, Any]) -> UserProfile:
        return UserProfile.from_dict(self._call("PUT", "/api/profile", {"form": form}))

    def feedback(self, record_id: str, rating: Optional[int] = None) -> UserProfile:
        data = self._call("POST", "/api/feedback", {"record_id": record_id, "rating": rating})
        return UserProfile.from_dict(data)

    def close(self) -> None:
        self._session.close()

    def __enter__(self) -> "PlatformClient":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()
