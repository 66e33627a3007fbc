"""HTTP API of the serve process and its client."""

from .client import PlatformClient
from .routes import TOKEN_HEADER, create_api_router, create_platform_app

__all__ = [
    "TOKEN_HEADER",
    "PlatformClient",
    "create_api_router",
    "create_platform_app",
]
