"""
Collecting records from one location, shared by web agents and the mobile
coordinator.
"""

import logging
from dataclasses import dataclass
from typing import Any, Iterable, Optional

from ..errors import FetchError, ParseError
from ..personalization.results import ResultItem
from ..platform.clock import Clock
from ..platform.messages import Location
from ..sites.corpus import SiteRecord
from ..sites.scraper import get_results
from ..sites.transport import Transport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CollectedRecord:
    """A record as collected at a location, before post-processing."""

    record: SiteRecord
    location_id: str
    category: str
    assurance_level: int
    matched_terms: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "record": self.record.to_dict(),
            "location_id": self.location_id,
            "category": self.category,
            "assurance_level": self.assurance_level,
            "matched_terms": list(self.matched_terms),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CollectedRecord":
        return cls(
            record=SiteRecord.from_dict(data["record"]),
            location_id=str(data["location_id"]),
            category=str(data["category"]),
            assurance_level=int(data["assurance_level"]),
            matched_terms=tuple(data["matched_terms"]),
        )

    def to_result_item(self) -> ResultItem:
        return ResultItem(
            record=self.record,
            source_location=self.location_id,
            matched_terms=frozenset(self.matched_terms),
            categories=frozenset({self.category}),
            assurance_level=self.assurance_level,
        )

    @property
    def key(self) -> tuple[str, str]:
        return (self.location_id, self.record.record_id)


@dataclass
class LocationVisit:
    """What one location yielded."""

    location_id: str
    records: list[CollectedRecord]
    elapsed_ms: float
    failure: Optional[str] = None


def collect_location(
    location: Location,
    search_terms: Iterable[str],
    transport: Transport,
    clock: Clock,
) -> LocationVisit:
    """
    Submit every search term to a location's site and gather the matches.

    A record matched by several terms is returned once with all of them.
    Transport and parse errors end the visit and are reported as a failure.
    """
    started = clock.now_ms()
    site = location.site
    found: dict[str, tuple[SiteRecord, list[str]]] = {}
    failure = None
    try:
        for term in search_terms:
            for record in get_results(location, term, transport):
                entry = found.setdefault(record.record_id, (record, []))
                if term not in entry[1]:
                    entry[1].append(term)
    except (FetchError, ParseError) as e:
        failure = f"{location.location_id}: {e}"
        logger.warning("Collection failed at %s: %s", location.location_id, e)

    records = [
        CollectedRecord(
            record=record,
            location_id=location.location_id,
            category=site.category,
            assurance_level=site.assurance_level,
            matched_terms=tuple(terms),
        )
        for record, terms in found.values()
    ]
    return LocationVisit(location.location_id, records, clock.now_ms() - started, failure)
