"""
Platform HTTP API used by the command-line clients of a running server.
"""

import logging
from typing import TYPE_CHECKING, Any, Optional

from fastapi import APIRouter, FastAPI, Header, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..errors import (
    AuthFailed,
    AuthRequired,
    EmptyQuery,
    MedSearchError,
    PlatformError,
    UnknownResult,
)
from ..search.system import SearchSystem
from ..security.gate import Credential
from ..sites.server import create_site_router

if TYPE_CHECKING:
    from ..app import MedSearchApp

logger = logging.getLogger(__name__)

TOKEN_HEADER = "X-Session-Token"

_STATUS = {
    AuthFailed: 401,
    AuthRequired: 401,
    EmptyQuery: 400,
    UnknownResult: 404,
    PlatformError: 503,
}


class LoginBody(BaseModel):
    user_id: str
    source_ip: Optional[str] = None


class QueryBody(BaseModel):
    text: str
    topology: Optional[str] = None


class ProfileBody(BaseModel):
    form: dict[str, Any] = Field(default_factory=dict)


class FeedbackBody(BaseModel):
    record_id: str
    rating: Optional[int] = None


def error_body(error: BaseException) -> dict[str, Any]:
    code = error.exit_code if isinstance(error, MedSearchError) else 1
    return {"error": type(error).__name__, "message": str(error), "exit_code": code}


def status_for(error: BaseException) -> int:
    for cls, status in _STATUS.items():
        if isinstance(error, cls):
            return status
    if isinstance(error, ValueError):
        return 422
    return 500


def create_api_router(app: "MedSearchApp") -> APIRouter:
    """Login, search, profile and feedback endpoints."""
    router = APIRouter(prefix="/api")

    def system() -> SearchSystem:
        if app.system is None:
            raise PlatformError("platform is not ready")
        return app.system

    @router.get("/health")
    def health() -> dict:
        ready = app.system is not None
        return {"status": "ok" if ready else "starting", "locations": len(app.corpus or ())}

    @router.post("/login")
    def login(body: LoginBody, request: Request) -> dict:
        peer = request.client.host if request.client else ""
        # A claimed address must be the one the request comes from
        if body.source_ip and body.source_ip != peer:
            raise AuthFailed()
        session = system().sessions.login(Credential(body.user_id, peer))
        return {"token": session.token, "ttl_s": system().sessions.ttl_s}

    @router.post("/logout")
    def logout(x_session_token: Optional[str] = Header(default=None)) -> dict:
        return {"logged_out": system().sessions.logout(x_session_token or "")}

    # Plain def handlers run in the threadpool; searches block on the platform
    @router.post("/query")
    def query(body: QueryBody, x_session_token: Optional[str] = Header(default=None)) -> dict:
        return system().search(x_session_token, body.text, body.topology).to_dict()

    @router.get("/profile")
    def get_profile(x_session_token: Optional[str] = Header(default=None)) -> dict:
        return system().get_profile(x_session_token).to_dict()

    @router.put("/profile")
    def put_profile(
        body: ProfileBody, x_session_token: Optional[str] = Header(default=None)
    ) -> dict:
        return system().update_profile(x_session_token, body.form).to_dict()

    @router.post("/feedback")
    def feedback(body: FeedbackBody, x_session_token: Optional[str] = Header(default=None)) -> dict:
        profile = system().feedback(x_session_token, body.record_id, body.rating)
        return profile.to_dict()

    return router


def create_platform_app(app: "MedSearchApp") -> FastAPI:
    """The serve process: platform API plus the site pages."""
    api = FastAPI(title="medsearch")
    api.include_router(create_api_router(app))
    if app.site_service is not None:
        api.include_router(create_site_router(app.site_service))

    @api.exception_handler(MedSearchError)
    def on_error(request: Request, exc: MedSearchError) -> JSONResponse:
        logger.info("%s %s -> %s", request.method, request.url.path, type(exc).__name__)
        return JSONResponse(error_body(exc), status_code=status_for(exc))

    @api.exception_handler(ValueError)
    def on_value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(error_body(exc), status_code=422)

    return api
