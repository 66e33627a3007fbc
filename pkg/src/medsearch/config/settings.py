"""
Configuration and settings management.

Settings live in a flat ``key = value`` text file whose keys are the
Settings field names. Unknown keys are ignored so older config files keep
loading.
"""

import logging
import os
import secrets
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from ..errors import ConfigError

logger = logging.getLogger(__name__)

APP_NAME = "medsearch"
CONFIG_FILENAME = "medsearch.conf"
SECRET_FILENAME = "platform.secret"

TOPOLOGIES = ("static", "mobile")
TRANSPORTS = ("inprocess", "http")
SCHEDULERS = ("threaded", "deterministic")


def get_app_data_dir() -> Path:
    """Get the default data directory."""
    base = os.environ.get("MEDSEARCH_HOME")
    if base:
        return Path(base)
    return Path.home() / ".config" / APP_NAME


@dataclass
class Settings:
    """Operator configuration shared by the server and the command line."""

    # Inputs
    corpus_path: str = ""
    dictionary_path: str = ""  # empty = packaged fixture dictionary
    data_dir: str = ""

    # Serving
    bind_address: str = "127.0.0.1:8642"
    server_url: str = ""  # empty = derived from bind_address
    transport: str = "inprocess"
    scheduler: str = "threaded"

    # Search
    topology: str = "mobile"
    required_assurance: int = 2
    session_ttl_s: int = 1800

    # Benchmark
    c_msg: float = 1.0
    c_move: float = 0.0
    kappa: float = 0.0
    repetitions: int = 10

    seed: int = 1
    secret_path: str = ""

    def resolved_data_dir(self) -> Path:
        """Data directory, defaulting to the per-user app directory."""
        return Path(self.data_dir) if self.data_dir else get_app_data_dir()

    def resolved_server_url(self) -> str:
        """Base URL of a running ``serve`` process."""
        if self.server_url:
            return self.server_url.rstrip("/")
        return f"http://{self.bind_address}"

    def bind_host_port(self) -> tuple[str, int]:
        """Split bind_address into host and port."""
        host, _, port = self.bind_address.rpartition(":")
        try:
            return host or "127.0.0.1", int(port)
        except ValueError as e:
            raise ConfigError(f"invalid bind_address: {self.bind_address!r}") from e

    def validate(self, require_corpus: bool = True) -> "Settings":
        """
        Check paths and enumerations.

        Args:
            require_corpus: Whether corpus_path must point to an existing corpus

        Returns:
            self, for chaining

        Raises:
            ConfigError: on the first invalid field
        """
        if self.topology not in TOPOLOGIES:
            raise ConfigError(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        if self.transport not in TRANSPORTS:
            raise ConfigError(f"transport must be one of {TRANSPORTS}, got {self.transport!r}")
        if self.scheduler not in SCHEDULERS:
            raise ConfigError(f"scheduler must be one of {SCHEDULERS}, got {self.scheduler!r}")
        if not 0 <= self.required_assurance <= 3:
            raise ConfigError("required_assurance must be within 0..3")
        if self.session_ttl_s <= 0:
            raise ConfigError("session_ttl_s must be positive")
        if min(self.c_msg, self.c_move, self.kappa) < 0:
            raise ConfigError("c_msg, c_move and kappa must be >= 0")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if require_corpus:
            if not self.corpus_path:
                raise ConfigError("corpus_path is not set")
            if not Path(self.corpus_path).exists():
                raise ConfigError(f"corpus_path does not exist: {self.corpus_path}")
        if self.dictionary_path and not Path(self.dictionary_path).exists():
            raise ConfigError(f"dictionary_path does not exist: {self.dictionary_path}")
        self.bind_host_port()
        return self

    def to_dict(self) -> dict:
        """Convert settings to dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Settings":
        """Create settings from dictionary, coercing text values to field types."""
        kwargs = {}
        for f in fields(cls):
            if f.name not in data:
                continue
            value = data[f.name]
            try:
                if f.type in (int, "int"):
                    value = int(value)
                elif f.type in (float, "float"):
                    value = float(value)
                else:
                    value = str(value)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"invalid value for {f.name}: {value!r}") from e
            kwargs[f.name] = value
        return cls(**kwargs)


def parse_config_text(text: str) -> dict[str, str]:
    """
    Parse flat ``key = value`` lines.

    Blank lines and lines starting with '#' are skipped.
    """
    data: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        data[key.strip()] = value.strip()
    return data


def load_settings(path: Optional[str | Path] = None) -> Settings:
    """
    Load settings from a config file.

    Args:
        path: Config file; None means defaults only

    Returns:
        Settings instance

    Raises:
        ConfigError: if the file is missing or malformed
    """
    if path is None:
        return Settings()

    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"config file not found: {config_path}")

    data = parse_config_text(config_path.read_text(encoding="utf-8"))
    unknown = set(data) - {f.name for f in fields(Settings)}
    if unknown:
        logger.warning("Ignoring unknown config keys: %s", sorted(unknown))

    settings = Settings.from_dict(data)
    # Relative paths in the file are relative to the file
    for name in ("corpus_path", "dictionary_path", "data_dir", "secret_path"):
        value = getattr(settings, name)
        if value and not Path(value).is_absolute():
            setattr(settings, name, str((config_path.parent / value).resolve()))
    return settings


def render_settings(settings: Settings) -> str:
    """Render settings back into the flat config format."""
    return "".join(f"{key} = {value}\n" for key, value in settings.to_dict().items())


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the process-wide settings (defaults until configure() is called)."""
    global _settings

    if _settings is None:
        _settings = Settings()

    return _settings


def configure(settings: Settings) -> Settings:
    """Install settings as the process-wide instance."""
    global _settings
    _settings = settings
    return settings


def read_secret(settings: Settings) -> bytes:
    """
    Read the platform secret from its file, creating one if absent.

    The secret never comes from the command line.
    """
    path = (
        Path(settings.secret_path)
        if settings.secret_path
        else settings.resolved_data_dir() / SECRET_FILENAME
    )
    if path.exists():
        try:
            secret = bytes.fromhex(path.read_text(encoding="utf-8").strip())
        except ValueError as e:
            raise ConfigError(f"secret file is not hex: {path}") from e
        if len(secret) < 32:
            raise ConfigError(f"secret in {path} is shorter than 32 bytes")
        return secret

    path.parent.mkdir(parents=True, exist_ok=True)
    secret = secrets.token_bytes(32)
    path.write_text(secret.hex(), encoding="utf-8")
    try:
        os.chmod(path, 0o600)
    except OSError:
        pass
    logger.info("Created platform secret at %s", path)
    return secret
