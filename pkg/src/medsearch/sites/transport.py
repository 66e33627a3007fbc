"""
Fetch interface between agents and sites.

Two implementations with identical results: an in-process transport that
calls the site service directly and injects the latency on the platform
clock, and an HTTP transport talking to a running site server.
"""

import logging
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Optional

import requests

from ..errors import FetchError
from ..platform.clock import Clock, RealClock
from .service import SiteService

logger = logging.getLogger(__name__)

LATENCY_HEADER = "X-Collect-Latency-Ms"


@dataclass(frozen=True)
class FetchRecord:
    """One request that crossed the platform boundary."""

    url: str
    params: dict[str, str] = field(default_factory=dict)


def _no_contention() -> float:
    return 1.0


class Transport(ABC):
    """Fetches site pages and keeps a log of everything sent out."""

    def __init__(
        self,
        clock: Optional[Clock] = None,
        slowdown: Callable[[], float] = _no_contention,
    ):
        """
        Args:
            clock: Clock that latency is charged on
            slowdown: Current contention factor (>= 1) applied to collection latency
        """
        self.clock = clock or RealClock()
        self.slowdown = slowdown
        self._log_lock = threading.Lock()
        self._log: list[FetchRecord] = []

    def fetch(self, url: str, params: Optional[dict[str, str]] = None) -> str:
        """
        Return the body of a site page.

        Raises:
            FetchError: the site is unreachable or answered with an error
        """
        params = dict(params or {})
        with self._log_lock:
            self._log.append(FetchRecord(url, params))
        return self._fetch(url, params)

    @abstractmethod
    def _fetch(self, url: str, params: dict[str, str]) -> str: ...

    def fetch_log(self) -> list[FetchRecord]:
        with self._log_lock:
            return list(self._log)

    def close(self) -> None:
        return None


class InProcessTransport(Transport):
    """Calls the site service in the same process."""

    def __init__(
        self,
        service: SiteService,
        clock: Optional[Clock] = None,
        slowdown: Callable[[], float] = _no_contention,
    ):
        super().__init__(clock, slowdown)
        self.service = service

    def _fetch(self, url: str, params: dict[str, str]) -> str:
        response = self.service.handle(url, params)
        if response.latency_ms:
            self.clock.sleep_ms(response.latency_ms * self.slowdown())
        if response.status != 200:
            raise FetchError(f"{url}: HTTP {response.status}")
        return response.body


class HttpTransport(Transport):
    """
    Talks to a site server over HTTP.

    The server already waits out the collection latency; contention adds
    the remaining (factor - 1) share on the client side.
    """

    def __init__(
        self,
        base_url: str,
        clock: Optional[Clock] = None,
        slowdown: Callable[[], float] = _no_contention,
        timeout: float = 30.0,
    ):
        super().__init__(clock, slowdown)
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()

    def _fetch(self, url: str, params: dict[str, str]) -> str:
        target = url if url.startswith("http") else f"{self.base_url}{url}"
        try:
            response = self._session.get(target, params=params or None, timeout=self.timeout)
        except requests.RequestException as e:
            raise FetchError(f"{url}: {e}") from e
        if response.status_code != 200:
            raise FetchError(f"{url}: HTTP {response.status_code}")

        latency = float(response.headers.get(LATENCY_HEADER, "0") or 0)
        extra = latency * (self.slowdown() - 1.0)
        if extra > 0:
            self.clock.sleep_ms(extra)
        return response.text

    def close(self) -> None:
        self._session.close()
