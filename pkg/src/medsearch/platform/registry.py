"""
White pages (live agents) and yellow pages (services) in one registry.
"""

import logging
import threading
from dataclasses import dataclass

from ..errors import AlreadyRegistered, NameTaken, UnknownAgent
from .messages import AgentId, ServiceDescription

logger = logging.getLogger(__name__)


@dataclass
class _ServiceEntry:
    description: ServiceDescription
    owner: str


class AgentRegistry:
    """
    Two indexes over the agents of one platform.

    Agents are keyed by name, so a service stays attached to its owner
    across migrations; searches return the owner's current AgentId.
    """

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._white: dict[str, AgentId] = {}
        self._live: set[str] = set()
        self._yellow: list[_ServiceEntry] = []

    # White pages

    def add_agent(self, agent_id: AgentId) -> None:
        with self._lock:
            if agent_id.name in self._live:
                raise NameTaken(f"agent name already live: {agent_id.name}")
            self._white[agent_id.name] = agent_id
            self._live.add(agent_id.name)

    def update_agent(self, agent_id: AgentId) -> None:
        """Record a new incarnation after migration."""
        with self._lock:
            if agent_id.name not in self._white:
                raise UnknownAgent(agent_id.name)
            self._white[agent_id.name] = agent_id

    def mark_dead(self, name: str) -> None:
        """Remove an agent from the live set and drop its services."""
        with self._lock:
            self._live.discard(name)
            self._yellow = [e for e in self._yellow if e.owner != name]

    def lookup(self, name: str) -> AgentId | None:
        """Current AgentId for a live agent, None otherwise."""
        with self._lock:
            if name not in self._live:
                return None
            return self._white[name]

    def is_live(self, name: str) -> bool:
        with self._lock:
            return name in self._live

    def live_agents(self) -> list[AgentId]:
        with self._lock:
            return [self._white[n] for n in self._white if n in self._live]

    # Yellow pages

    def register_service(self, agent_id: AgentId, svc: ServiceDescription) -> None:
        """
        Publish a service for a live agent.

        Raises:
            UnknownAgent: the agent is not live
            AlreadyRegistered: the same (type, owner) pair is already published
        """
        with self._lock:
            if agent_id.name not in self._live:
                raise UnknownAgent(f"agent not live: {agent_id.name}")
            for entry in self._yellow:
                if (
                    entry.owner == agent_id.name
                    and entry.description.service_type == svc.service_type
                ):
                    raise AlreadyRegistered(
                        f"{agent_id.name} already registered as {svc.service_type!r}"
                    )
            self._yellow.append(_ServiceEntry(svc, agent_id.name))
        logger.debug("Registered %s as %r (%s)", agent_id, svc.service_type, svc.service_name)

    def deregister_service(self, agent_id: AgentId, service_type: str) -> bool:
        """Withdraw a service. Returns True if something was removed."""
        with self._lock:
            before = len(self._yellow)
            self._yellow = [
                e
                for e in self._yellow
                if not (e.owner == agent_id.name and e.description.service_type == service_type)
            ]
            return len(self._yellow) != before

    def search_service(self, service_type: str) -> list[AgentId]:
        """Live owners of a service type, in registration order."""
        with self._lock:
            return [
                self._white[e.owner]
                for e in self._yellow
                if e.description.service_type == service_type and e.owner in self._live
            ]
