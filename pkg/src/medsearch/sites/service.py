"""
Site service logic shared by the HTTP server and the in-process transport.
"""

import logging
import threading
from dataclasses import dataclass
from typing import Optional
from urllib.parse import urlsplit

from .corpus import Corpus, drug_lookup
from .pages import form_spec_for, render_result_page, render_search_page

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SiteResponse:
    """A rendered response and the collection latency it must be delayed by."""

    status: int
    body: str
    latency_ms: int = 0


class SiteService:
    """Routes site requests against an immutable corpus."""

    def __init__(self, corpus: Corpus):
        self.corpus = corpus
        self._lock = threading.Lock()
        self._offline: set[str] = set()

    def set_offline(self, site_id: str, offline: bool = True) -> None:
        """Make a site answer 503, as an unreachable site would."""
        with self._lock:
            if offline:
                self._offline.add(site_id)
            else:
                self._offline.discard(site_id)

    def _unavailable(self, site_id: str) -> Optional[SiteResponse]:
        with self._lock:
            offline = site_id in self._offline
        if offline:
            return SiteResponse(503, f"site {site_id} unavailable")
        if self.corpus.site(site_id) is None:
            return SiteResponse(404, f"no such site: {site_id}")
        return None

    def search_page(self, site_id: str) -> SiteResponse:
        """The form page; it does no collection work and carries no latency."""
        error = self._unavailable(site_id)
        if error:
            return error
        site = self.corpus.site(site_id)
        return SiteResponse(200, render_search_page(site, form_spec_for(site_id)))

    def search(self, site_id: str, term: str) -> SiteResponse:
        """Substring scan of the site; an empty term matches every record."""
        error = self._unavailable(site_id)
        if error:
            return error
        site = self.corpus.site(site_id)
        records = site.scan(term)
        logger.debug("Site %s: %d matches", site_id, len(records))
        return SiteResponse(
            200,
            render_result_page(site, form_spec_for(site_id), term, records),
            site.collect_latency_ms,
        )

    def drugs(self, disease: str) -> list[str]:
        return drug_lookup(disease, self.corpus)

    def handle(self, url: str, params: Optional[dict[str, str]] = None) -> SiteResponse:
        """Route a relative URL the way the HTTP server does."""
        parts = [p for p in urlsplit(url).path.split("/") if p]
        params = params or {}
        if len(parts) == 2 and parts[0] == "site":
            return self.search_page(parts[1])
        if len(parts) == 3 and parts[0] == "site" and parts[2] == "search":
            return self.search(parts[1], params.get("q", ""))
        return SiteResponse(404, f"no route for {url}")
