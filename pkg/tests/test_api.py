"""Platform HTTP API and its client."""

from types import SimpleNamespace

import pytest
from fastapi.testclient import TestClient

from medsearch.api import TOKEN_HEADER, PlatformClient, create_platform_app
from medsearch.errors import AuthFailed, AuthRequired, EmptyQuery, UnknownResult
from medsearch.sites import SiteServer

from conftest import IMMUNE, USER


def app_for(system):
    return SimpleNamespace(
        system=system, corpus=system.corpus, site_service=system.site_service
    )


@pytest.fixture
def client(system):
    return TestClient(create_platform_app(app_for(system)))


def test_health(client, corpus):
    assert client.get("/api/health").json() == {"status": "ok", "locations": len(corpus)}


def test_query_needs_a_token(client):
    response = client.post("/api/query", json={"text": "fever"})
    assert response.status_code == 401
    assert response.json()["error"] == "AuthRequired"
    assert response.json()["exit_code"] == 5


def test_query_and_feedback(client, token):
    headers = {TOKEN_HEADER: token}

    response = client.post("/api/query", json={"text": "fevr"}, headers=headers)
    assert response.status_code == 200
    ids = [r["record_id"] for r in response.json()["results"]]
    assert ids == ["respiratory-01-r001", "immune-01-r001"]

    response = client.post("/api/feedback", json={"record_id": "immune-01-r001"}, headers=headers)
    assert response.json()["preferences"] == {IMMUNE: 0.02}

    response = client.post(
        "/api/feedback", json={"record_id": "skin-01-r001", "rating": 1}, headers=headers
    )
    assert response.status_code == 404


def test_error_statuses(client, token):
    headers = {TOKEN_HEADER: token}
    assert client.post("/api/query", json={"text": "on do"}, headers=headers).status_code == 400
    response = client.put(
        "/api/profile", json={"form": {"preferences": {"astrology": 1}}}, headers=headers
    )
    assert response.status_code == 422
    assert response.json()["error"] == "ValueError"


def test_login_checks_the_peer_address(client):
    # The test client's peer is not an IP address, so no user can log in from it
    response = client.post("/api/login", json={"user_id": USER})
    assert response.status_code == 401
    response = client.post("/api/login", json={"user_id": USER, "source_ip": "10.0.0.7"})
    assert response.status_code == 401


def test_site_pages_are_served_alongside(client):
    assert client.get("/site/skin-01").status_code == 200


def test_client_against_a_live_server(system, sessions):
    sessions.directory.register(USER, ["127.0.0.1"])
    server = SiteServer(create_platform_app(app_for(system)), "127.0.0.1", 0).start()
    try:
        with PlatformClient(server.base_url) as api:
            assert api.health()["status"] == "ok"
            with pytest.raises(AuthRequired):
                api.query("fever")

            api.login(USER)
            result = api.query("fevr", "static")
            assert [r.record_id for r in result.results] == [
                "respiratory-01-r001",
                "immune-01-r001",
            ]

            profile = api.update_profile({"health_conditions": ["asthma"]})
            assert api.profile() == profile
            assert api.feedback("immune-01-r001", 1).preferences == {IMMUNE: 0.1}
            with pytest.raises(UnknownResult):
                api.feedback("nowhere")
            with pytest.raises(EmptyQuery):
                api.query("between do on")
            with pytest.raises(ValueError):
                api.update_profile({"preferences": {"astrology": 1}})

            assert api.logout()
            with pytest.raises(AuthRequired):
                api.profile()

            with pytest.raises(AuthFailed):
                api.login(USER, source_ip="10.9.9.9")
    finally:
        server.stop()
