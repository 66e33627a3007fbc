"""
HTML rendering for site pages.

Every site serves a search page holding one disease-search form and a
result page listing matching records. Record fields are entity-escaped.
"""

from dataclasses import dataclass
from html import escape

from .corpus import SiteManifest, SiteRecord

RECORD_ID_ATTR = "data-record-id"
RESULTS_ELEMENT_ID = "results"


@dataclass(frozen=True)
class SearchFormSpec:
    """Element ids an agent needs to drive a site's search form."""

    form_element_id: str
    query_attribute_name: str
    submit_button_id: str


def form_spec_for(site_id: str) -> SearchFormSpec:
    """Form ids differ per site; the query parameter is always ``q``."""
    return SearchFormSpec(
        form_element_id=f"disease-search-{site_id}",
        query_attribute_name="q",
        submit_button_id=f"submit-{site_id}",
    )


def _e(text: str) -> str:
    return escape(text, quote=True)


def _form(site: SiteManifest, spec: SearchFormSpec, value: str = "") -> str:
    return (
        f'<form id="{_e(spec.form_element_id)}" action="/site/{_e(site.site_id)}/search" '
        f'method="get">\n'
        f'<label for="{_e(spec.form_element_id)}-input">Disease</label>\n'
        f'<input type="text" id="{_e(spec.form_element_id)}-input" '
        f'name="{_e(spec.query_attribute_name)}" value="{_e(value)}">\n'
        f'<button type="submit" id="{_e(spec.submit_button_id)}">Search</button>\n'
        f"</form>\n"
    )


def _page(site: SiteManifest, body: str) -> str:
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n'
        "<head>\n"
        '<meta charset="utf-8">\n'
        f"<title>{_e(site.site_id)} disease search</title>\n"
        "</head>\n"
        "<body>\n"
        f'<h1 class="site" data-category="{_e(site.category)}">{_e(site.site_id)}</h1>\n'
        f"{body}"
        "</body>\n"
        "</html>\n"
    )


def _result_entry(record: SiteRecord) -> str:
    drugs = "".join(f'<span class="drug">{_e(d)}</span>' for d in record.drugs)
    return (
        f'<div class="result" {RECORD_ID_ATTR}="{_e(record.record_id)}">'
        f'<h2 class="disease">{_e(record.disease)}</h2>'
        f'<p class="description">{_e(record.description)}</p>'
        f'<div class="drugs">{drugs}</div>'
        f"</div>\n"
    )


def render_search_page(site: SiteManifest, spec: SearchFormSpec) -> str:
    return _page(site, _form(site, spec))


def render_result_page(
    site: SiteManifest,
    spec: SearchFormSpec,
    term: str,
    records: list[SiteRecord],
) -> str:
    entries = "".join(_result_entry(r) for r in records)
    body = (
        _form(site, spec, term)
        + f'<div id="{RESULTS_ELEMENT_ID}" data-count="{len(records)}">\n'
        + entries
        + "</div>\n"
    )
    return _page(site, body)
