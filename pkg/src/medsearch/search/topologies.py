"""
Collection topologies and what a collection run produces.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable

from ..platform.messages import Location
from ..security.gate import check_assurance
from .collect import CollectedRecord


class TopologyKind(Enum):
    """How records are collected from the sites."""

    STATIC = "static"  # coordinator plus one web agent per category
    MOBILE = "mobile"  # one agent migrating through every location

    @classmethod
    def parse(cls, value: "str | TopologyKind") -> "TopologyKind":
        if isinstance(value, TopologyKind):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown topology: {value!r}") from None


COORDINATOR_SERVICE = "coordinator"
STATIC_COORDINATOR_SERVICE = "static-coordinator"


def coordination_service(topology: TopologyKind) -> str:
    """Directory service type published by a topology's coordinator."""
    if topology is TopologyKind.MOBILE:
        return COORDINATOR_SERVICE
    return STATIC_COORDINATOR_SERVICE


def filter_locations(
    locations: Iterable[Location], categories: Iterable[str], required: int
) -> list[Location]:
    """Locations in a target category whose site reaches the required assurance."""
    wanted = frozenset(categories)
    return [
        loc
        for loc in locations
        if loc.categories & wanted and check_assurance(loc.site, required)
    ]


@dataclass(frozen=True)
class ItineraryPlan:
    """Ordered places a mobile agent visits for one conversation."""

    locations: tuple[Location, ...]
    conversation_id: str

    def __post_init__(self) -> None:
        ids = self.location_ids()
        if len(set(ids)) != len(ids):
            raise ValueError("itinerary visits a location twice")

    def location_ids(self) -> list[str]:
        return [loc.location_id for loc in self.locations]

    def __len__(self) -> int:
        return len(self.locations)


@dataclass
class CollectionOutcome:
    """
    Records gathered by one collection run with its timing.

    ``total_ms`` spans the query-mod agent's request to its receipt of the
    completion message; ``messages_sent`` counts deliveries in the
    collection conversation.
    """

    topology: TopologyKind
    records: list[CollectedRecord] = field(default_factory=list)
    per_location_ms: dict[str, float] = field(default_factory=dict)
    messages_sent: int = 0
    total_ms: float = 0.0
    failures: list[str] = field(default_factory=list)
    migrations: int = 0

    def record_keys(self) -> set[tuple[str, str]]:
        """(location_id, record_id) of every collected record."""
        return {r.key for r in self.records}

    def to_dict(self) -> dict[str, Any]:
        return {
            "topology": self.topology.value,
            "records": [r.to_dict() for r in self.records],
            "per_location_ms": {k: round(v, 3) for k, v in sorted(self.per_location_ms.items())},
            "messages_sent": self.messages_sent,
            "total_ms": round(self.total_ms, 3),
            "failures": list(self.failures),
            "migrations": self.migrations,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CollectionOutcome":
        return cls(
            topology=TopologyKind.parse(data["topology"]),
            records=[CollectedRecord.from_dict(r) for r in data.get("records", [])],
            per_location_ms={str(k): float(v) for k, v in data.get("per_location_ms", {}).items()},
            messages_sent=int(data.get("messages_sent", 0)),
            total_ms=float(data.get("total_ms", 0.0)),
            failures=[str(f) for f in data.get("failures", [])],
            migrations=int(data.get("migrations", 0)),
        )
