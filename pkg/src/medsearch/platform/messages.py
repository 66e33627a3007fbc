"""
Agent identities, messages, locations and trace records.
"""

import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any

from ..taxonomy import CATEGORY_SET

if TYPE_CHECKING:
    from ..sites.corpus import SiteManifest


class Performative(Enum):
    """Speech-act tags carried by every message."""

    REQUEST = "REQUEST"
    INFORM = "INFORM"
    CONFIRM = "CONFIRM"
    FAILURE = "FAILURE"


@dataclass(frozen=True, order=True)
class AgentId:
    """Agent identity. The incarnation grows by one on every migration."""

    name: str
    incarnation: int = 1

    def __str__(self) -> str:
        return f"{self.name}#{self.incarnation}"

    def next_incarnation(self) -> "AgentId":
        return AgentId(self.name, self.incarnation + 1)


@dataclass(frozen=True)
class ServiceDescription:
    """A yellow-pages entry: what an agent offers."""

    service_type: str
    service_name: str


@dataclass
class Message:
    """Envelope exchanged between agents. ``seq`` is set by the platform on delivery."""

    performative: Performative
    sender: AgentId
    receiver: AgentId
    conversation_id: str
    content: dict[str, Any] = field(default_factory=dict)
    seq: int = -1
    msg_id: str = field(default_factory=lambda: uuid.uuid4().hex)

    def __post_init__(self) -> None:
        if self.sender.name == self.receiver.name:
            raise ValueError(f"agent {self.sender.name} cannot message itself")

    def reply(self, performative: Performative, content: dict[str, Any] | None = None) -> "Message":
        """Build the answer to this message in the same conversation."""
        return Message(
            performative=performative,
            sender=self.receiver,
            receiver=self.sender,
            conversation_id=self.conversation_id,
            content=content or {},
        )


@dataclass(frozen=True)
class Location:
    """A place hosting one site; the unit of mobile-agent migration."""

    location_id: str
    site: "SiteManifest" = field(compare=False, repr=False)
    categories: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.categories:
            raise ValueError(f"location {self.location_id} has no categories")
        unknown = set(self.categories) - CATEGORY_SET
        if unknown:
            raise ValueError(f"location {self.location_id} has unknown categories {unknown}")

    @property
    def assurance_level(self) -> int:
        return self.site.assurance_level


@dataclass(frozen=True)
class TraceEvent:
    """One delivered message as the sniffer sees it."""

    seq: int
    timestamp: float
    performative: Performative
    sender: str
    receiver: str
    conversation_id: str

    def to_record(self) -> dict[str, Any]:
        """Flat export record with the fixed key names."""
        return {
            "seq": self.seq,
            "t_ms": round(self.timestamp, 3),
            "performative": self.performative.value,
            "from": self.sender,
            "to": self.receiver,
            "conversation": self.conversation_id,
        }
