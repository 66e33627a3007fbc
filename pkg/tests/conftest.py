"""Shared fixtures: a small hand-built corpus and a booted deterministic system."""

import pytest

from medsearch.personalization.profile import ProfileStore
from medsearch.platform import DeterministicScheduler
from medsearch.query.dictionary import load_dictionary
from medsearch.search.system import SearchSystem
from medsearch.security.gate import Credential, SessionManager
from medsearch.security.users import UserDirectory
from medsearch.sites.corpus import Corpus, SiteManifest, SiteRecord

RESPIRATORY = "respiratory and chest symptom"
IMMUNE = "hemic and immune system"
SKIN = "skin and intergumentary tissue symptom"

USER = "alice"
USER_IP = "10.0.0.7"
SECRET = bytes(range(32))


def make_corpus() -> Corpus:
    return Corpus(
        [
            SiteManifest(
                site_id="respiratory-01",
                category=RESPIRATORY,
                assurance_level=3,
                collect_latency_ms=50,
                records=(
                    SiteRecord(
                        "respiratory-01-r001",
                        "influenza fever",
                        "viral infection with fever cough and fatigue",
                        ("oseltamivir", "paracetamol"),
                    ),
                    SiteRecord(
                        "respiratory-01-r002",
                        "pneumonia",
                        "lung infection with cough and chest pain",
                        ("azithromycin",),
                    ),
                    SiteRecord(
                        "respiratory-01-r003",
                        "asthma",
                        "airway narrowing with wheezing",
                        ("salbutamol",),
                    ),
                ),
            ),
            SiteManifest(
                site_id="respiratory-02",
                category=RESPIRATORY,
                assurance_level=1,
                collect_latency_ms=70,
                records=(
                    SiteRecord(
                        "respiratory-02-r001",
                        "influenza fever",
                        "viral infection with fever cough and fatigue",
                        ("oseltamivir",),
                    ),
                    SiteRecord(
                        "respiratory-02-r002",
                        "bronchitis",
                        "inflamed airways with cough",
                        ("budesonide",),
                    ),
                ),
            ),
            SiteManifest(
                site_id="immune-01",
                category=IMMUNE,
                assurance_level=2,
                collect_latency_ms=90,
                records=(
                    SiteRecord(
                        "immune-01-r001",
                        "fever of unknown origin",
                        "prolonged fever without a clear cause",
                        ("paracetamol",),
                    ),
                    SiteRecord(
                        "immune-01-r002",
                        "anemia",
                        "low red cell count with pallor",
                        ("ferrous sulfate",),
                    ),
                ),
            ),
            SiteManifest(
                site_id="skin-01",
                category=SKIN,
                assurance_level=3,
                collect_latency_ms=30,
                records=(
                    SiteRecord(
                        "skin-01-r001",
                        "eczema",
                        "itchy red scaling skin",
                        ("hydrocortisone",),
                    ),
                ),
            ),
        ]
    )


@pytest.fixture
def corpus() -> Corpus:
    return make_corpus()


@pytest.fixture(scope="session")
def dictionary():
    return load_dictionary()


@pytest.fixture
def data_dir(tmp_path):
    path = tmp_path / "data"
    path.mkdir()
    return path


@pytest.fixture
def users() -> UserDirectory:
    directory = UserDirectory()
    directory.register(USER, [USER_IP])
    return directory


@pytest.fixture
def sessions(users) -> SessionManager:
    return SessionManager(users)


@pytest.fixture
def profiles(data_dir) -> ProfileStore:
    return ProfileStore(data_dir / "profiles")


@pytest.fixture
def system(corpus, dictionary, sessions, profiles):
    """Both topologies booted on a deterministic platform with free messaging."""
    with SearchSystem(
        corpus,
        dictionary,
        sessions,
        profiles,
        SECRET,
        scheduler=DeterministicScheduler(),
    ) as booted:
        yield booted


@pytest.fixture
def session(sessions):
    return sessions.login(Credential(USER, USER_IP))


@pytest.fixture
def token(session) -> str:
    return session.token
