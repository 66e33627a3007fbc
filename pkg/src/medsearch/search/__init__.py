"""Search agents, the static and mobile collection topologies and the search system."""

from .agents import (
    INTERFACE_AGENT,
    MOBILE_COORDINATOR,
    PERSONALIZE_AGENT,
    PROFILE_AGENT,
    QUERY_MOD_AGENT,
    STATIC_COORDINATOR,
    MobileCoordinatorBehavior,
    StaticCoordinatorBehavior,
    WebAgentBehavior,
    collection_conversation,
    web_agent_name,
)
from .collect import CollectedRecord, LocationVisit, collect_location
from .system import SearchResult, SearchSystem
from .topologies import (
    COORDINATOR_SERVICE,
    CollectionOutcome,
    ItineraryPlan,
    TopologyKind,
    coordination_service,
    filter_locations,
)

__all__ = [
    "COORDINATOR_SERVICE",
    "INTERFACE_AGENT",
    "MOBILE_COORDINATOR",
    "PERSONALIZE_AGENT",
    "PROFILE_AGENT",
    "QUERY_MOD_AGENT",
    "STATIC_COORDINATOR",
    "CollectedRecord",
    "CollectionOutcome",
    "ItineraryPlan",
    "LocationVisit",
    "MobileCoordinatorBehavior",
    "SearchResult",
    "SearchSystem",
    "StaticCoordinatorBehavior",
    "TopologyKind",
    "WebAgentBehavior",
    "collect_location",
    "collection_conversation",
    "coordination_service",
    "filter_locations",
    "web_agent_name",
]
