"""
HTTP site service: FastAPI routes served by uvicorn in a background thread.
"""

import logging
import socket
import threading
import time
from typing import Optional

import uvicorn
from fastapi import APIRouter, FastAPI, Response
from fastapi.responses import HTMLResponse

from ..errors import ServeError
from .corpus import Corpus
from .service import SiteResponse, SiteService
from .transport import LATENCY_HEADER

logger = logging.getLogger(__name__)


def _html(response: SiteResponse) -> Response:
    """Wait out the response latency, then render it."""
    if response.status == 200 and response.latency_ms:
        time.sleep(response.latency_ms / 1000.0)
    headers = {LATENCY_HEADER: str(response.latency_ms)}
    if response.status != 200:
        return Response(response.body, status_code=response.status, headers=headers)
    return HTMLResponse(response.body, headers=headers)


def create_site_router(service: SiteService) -> APIRouter:
    """Site pages and the drug lookup."""
    router = APIRouter()

    @router.get("/site/{site_id}")
    def search_page(site_id: str) -> Response:
        return _html(service.search_page(site_id))

    # Plain def handlers run in the threadpool, so sleeping requests overlap
    @router.get("/site/{site_id}/search")
    def search(site_id: str, q: str = "") -> Response:
        return _html(service.search(site_id, q))

    @router.get("/drugs")
    def drugs(disease: str = "") -> dict:
        return {"disease": disease, "drugs": service.drugs(disease)}

    return router


def create_site_app(service: SiteService) -> FastAPI:
    app = FastAPI(title="medsearch sites")
    app.include_router(create_site_router(service))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "sites": len(service.corpus)}

    return app


def parse_bind_address(bind_address: str) -> tuple[str, int]:
    host, sep, port = bind_address.rpartition(":")
    if not sep or not host:
        raise ServeError(f"invalid bind address: {bind_address!r}")
    try:
        return host, int(port)
    except ValueError:
        raise ServeError(f"invalid port in bind address: {bind_address!r}") from None


class SiteServer:
    """Runs a FastAPI app with uvicorn on a daemon thread."""

    def __init__(self, app: FastAPI, host: str = "127.0.0.1", port: int = 0):
        self.app = app
        self.host = host
        self.port = port
        self._server: Optional[uvicorn.Server] = None
        self._thread: Optional[threading.Thread] = None

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive()

    @property
    def base_url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def _check_bind(self) -> None:
        with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
            sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            try:
                sock.bind((self.host, self.port))
            except OSError as e:
                raise ServeError(f"cannot bind {self.host}:{self.port}: {e}") from e
            if self.port == 0:
                self.port = sock.getsockname()[1]

    def start(self, timeout_s: float = 10.0) -> "SiteServer":
        """
        Start serving and wait until the socket accepts connections.

        Raises:
            ServeError: the address cannot be bound or startup timed out
        """
        if self.running:
            return self
        self._check_bind()

        config = uvicorn.Config(
            self.app,
            host=self.host,
            port=self.port,
            log_level="warning",
            lifespan="off",
        )
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(
            target=self._server.run, name="site-server", daemon=True
        )
        self._thread.start()

        deadline = time.monotonic() + timeout_s
        while not self._server.started:
            if not self._thread.is_alive():
                raise ServeError(f"site server failed to start on {self.host}:{self.port}")
            if time.monotonic() > deadline:
                self.stop()
                raise ServeError(f"site server did not start within {timeout_s}s")
            time.sleep(0.01)
        logger.info("Serving on %s", self.base_url)
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.should_exit = True
        if self._thread is not None:
            self._thread.join(timeout=5.0)
        self._server = None
        self._thread = None


def serve(corpus: Corpus, bind_address: str) -> SiteServer:
    """
    Serve a corpus over HTTP.

    Raises:
        ServeError: bind failure
    """
    host, port = parse_bind_address(bind_address)
    service = SiteService(corpus)
    return SiteServer(create_site_app(service), host, port).start()
