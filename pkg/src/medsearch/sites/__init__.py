"""Synthetic medical sites: corpus, pages, service, transports and scraping."""

from .corpus import (
    Corpus,
    SiteManifest,
    SiteRecord,
    drug_lookup,
    generate_corpus,
    load_corpus,
    save_corpus,
)
from .pages import SearchFormSpec, form_spec_for, render_result_page, render_search_page
from .parser import ParsedPage, parse_page
from .scraper import get_results
from .server import SiteServer, create_site_app, create_site_router, parse_bind_address, serve
from .service import SiteResponse, SiteService
from .transport import (
    LATENCY_HEADER,
    FetchRecord,
    HttpTransport,
    InProcessTransport,
    Transport,
)

__all__ = [
    "Corpus",
    "FetchRecord",
    "HttpTransport",
    "InProcessTransport",
    "LATENCY_HEADER",
    "ParsedPage",
    "SearchFormSpec",
    "SiteManifest",
    "SiteRecord",
    "SiteResponse",
    "SiteServer",
    "SiteService",
    "Transport",
    "create_site_app",
    "create_site_router",
    "drug_lookup",
    "form_spec_for",
    "generate_corpus",
    "get_results",
    "load_corpus",
    "parse_bind_address",
    "parse_page",
    "render_result_page",
    "render_search_page",
    "save_corpus",
    "serve",
]
