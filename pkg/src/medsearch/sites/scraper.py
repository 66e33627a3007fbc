"""
Form-driven scraping of a site's disease search.
"""

import logging

from ..errors import ParseError
from ..platform.messages import Location
from .corpus import SiteRecord
from .pages import SearchFormSpec, form_spec_for
from .parser import parse_page
from .transport import Transport

logger = logging.getLogger(__name__)


def get_results(
    location: Location,
    search_term: str,
    transport: Transport,
    spec: SearchFormSpec | None = None,
) -> list[SiteRecord]:
    """
    Search one site through its HTML form.

    Steps: fetch the search page, find the disease-search form, set the
    query field to the term, submit the form and parse the result page.

    Args:
        location: Location hosting the site
        search_term: Disease term typed into the form
        transport: How pages are fetched
        spec: Form element ids; derived from the site id when omitted

    Returns:
        Records listed on the result page, in page order

    Raises:
        FetchError: transport failure
        ParseError: the page lacks the form or has a malformed result list
    """
    site_id = location.site.site_id
    spec = spec or form_spec_for(site_id)

    page = parse_page(transport.fetch(f"/site/{site_id}"))
    form = page.form(spec.form_element_id)
    query_field = form.field_named(spec.query_attribute_name)
    if not form.has_button(spec.submit_button_id):
        raise ParseError(f"form {spec.form_element_id} has no button {spec.submit_button_id!r}")

    query_field.value = search_term
    if not form.action:
        raise ParseError(f"form {spec.form_element_id} has no action")
    result_page = parse_page(transport.fetch(form.action, form.submission()))

    if result_page.results is None:
        raise ParseError(f"result page of {site_id} has no result list")
    logger.debug("Collected %d records from %s", len(result_page.results), location.location_id)
    return result_page.results
