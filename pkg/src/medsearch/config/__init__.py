"""Configuration and settings management."""

from .settings import (
    Settings,
    configure,
    get_settings,
    load_settings,
    read_secret,
    render_settings,
)

__all__ = [
    "Settings",
    "configure",
    "get_settings",
    "load_settings",
    "read_secret",
    "render_settings",
]
