"""
Main application orchestrator.

Wires together all components:
- Corpus and dictionary (inputs)
- User directory, sessions and profiles (security gate, personalization)
- Search system (agent platform with both collection topologies)
- HTTP server (platform API and site pages)
"""

import logging
import threading
from enum import Enum, auto
from pathlib import Path
from typing import Optional

from .api.routes import create_platform_app
from .config.settings import Settings, get_settings, read_secret
from .personalization.profile import ProfileStore
from .platform import make_scheduler
from .query.dictionary import Dictionary, load_dictionary
from .search.system import SearchSystem
from .search.topologies import TopologyKind
from .security.gate import SessionManager
from .security.users import USERS_FILENAME, UserDirectory
from .sites.corpus import Corpus, load_corpus
from .sites.server import SiteServer
from .sites.service import SiteService

logger = logging.getLogger(__name__)

PROFILES_DIRNAME = "profiles"


class AppState(Enum):
    """Application state machine states."""

    IDLE = auto()
    RUNNING = auto()
    STOPPED = auto()


def open_user_directory(settings: Settings) -> UserDirectory:
    return UserDirectory(settings.resolved_data_dir() / USERS_FILENAME)


def open_profiles(settings: Settings) -> ProfileStore:
    return ProfileStore(settings.resolved_data_dir() / PROFILES_DIRNAME)


def build_search_system(
    settings: Settings,
    corpus: Corpus,
    dictionary: Dictionary,
    sessions: SessionManager,
    site_url: Optional[str] = None,
    site_service: Optional[SiteService] = None,
) -> SearchSystem:
    """A search system configured from settings (not yet booted)."""
    return SearchSystem(
        corpus,
        dictionary,
        sessions,
        open_profiles(settings),
        read_secret(settings),
        topologies=(TopologyKind.STATIC, TopologyKind.MOBILE),
        default_topology=settings.topology,
        scheduler=make_scheduler(settings.scheduler),
        site_url=site_url,
        site_service=site_service,
        required_assurance=settings.required_assurance,
        c_msg=settings.c_msg,
        c_move=settings.c_move,
        kappa=settings.kappa,
    )


class MedSearchApp:
    """
    Main application controller.

    Manages the serve flow:
    1. Load corpus, dictionary and user directory
    2. Start the HTTP server (site pages, then the platform API)
    3. Boot the search system; the API answers once it is ready
    4. Stop everything on interrupt
    """

    def __init__(self, settings: Optional[Settings] = None):
        self._state = AppState.IDLE
        self._settings = settings or get_settings()
        self._stopped = threading.Event()

        self.corpus: Optional[Corpus] = None
        self.site_service: Optional[SiteService] = None
        self.system: Optional[SearchSystem] = None
        self._server: Optional[SiteServer] = None

    @property
    def state(self) -> AppState:
        return self._state

    @property
    def base_url(self) -> str:
        return self._server.base_url if self._server else self._settings.resolved_server_url()

    def start(self) -> "MedSearchApp":
        """
        Start serving.

        Raises:
            ConfigError: invalid settings or unreadable inputs
            ServeError: the bind address is unavailable
        """
        settings = self._settings.validate()
        Path(settings.resolved_data_dir()).mkdir(parents=True, exist_ok=True)

        self.corpus = load_corpus(settings.corpus_path)
        dictionary = load_dictionary(settings.dictionary_path or None)
        sessions = SessionManager(open_user_directory(settings), ttl_s=settings.session_ttl_s)
        self.site_service = SiteService(self.corpus)

        host, port = settings.bind_host_port()
        self._server = SiteServer(create_platform_app(self), host, port).start()

        site_url = self._server.base_url if settings.transport == "http" else None
        system = build_search_system(
            settings, self.corpus, dictionary, sessions, site_url, self.site_service
        )
        self.system = system.boot()
        self._state = AppState.RUNNING
        logger.info("Platform ready on %s (%s transport)", self.base_url, settings.transport)
        return self

    def wait(self) -> None:
        """Block until stop() is called or the process is interrupted."""
        try:
            while not self._stopped.wait(0.5):
                pass
        except KeyboardInterrupt:
            logger.info("Interrupted")
        finally:
            self.stop()

    def stop(self) -> None:
        """Stop the application."""
        if self._state is AppState.STOPPED:
            return
        self._stopped.set()
        if self.system is not None:
            self.system.shutdown()
        if self._server is not None:
            self._server.stop()
        self._state = AppState.STOPPED
