"""
Agent behaviors and the context handed to them by the runtime.
"""

from typing import TYPE_CHECKING, Any, Optional

from .messages import AgentId, Location, Message, Performative, ServiceDescription

if TYPE_CHECKING:
    from .runtime import Platform


class AgentBehavior:
    """
    Base class for agent behaviors.

    Lifecycle:
        - ``setup(ctx)`` runs once right after spawn (register services here).
        - ``handle(ctx, message)`` runs for each delivered message, one at a time.
        - ``after_move(ctx, location)`` runs once on arrival after each migration.

    State that must survive migration is returned by ``snapshot()`` as plain
    data and re-installed by ``restore()``; it is serialized in between.
    """

    # Counted by the platform's contention model while the agent is live
    contends: bool = False

    def setup(self, ctx: "AgentContext") -> None:
        return None

    def handle(self, ctx: "AgentContext", message: Message) -> None:
        raise NotImplementedError("Behaviors must implement handle(...)")

    def after_move(self, ctx: "AgentContext", location: Location) -> None:
        return None

    def snapshot(self) -> dict[str, Any]:
        return {}

    def restore(self, state: dict[str, Any]) -> None:
        return None


class AgentContext:
    """Runtime view an agent uses to talk to the platform."""

    def __init__(self, platform: "Platform", name: str):
        self._platform = platform
        self._name = name

    @property
    def platform(self) -> "Platform":
        return self._platform

    @property
    def agent_id(self) -> AgentId:
        """Current identity (the incarnation changes after each move)."""
        return self._platform.agent_record(self._name).agent_id

    @property
    def location(self) -> Optional[Location]:
        return self._platform.agent_record(self._name).location

    def send(
        self,
        performative: Performative,
        receiver: AgentId,
        conversation_id: str,
        content: dict[str, Any] | None = None,
    ) -> Message:
        message = Message(
            performative=performative,
            sender=self.agent_id,
            receiver=receiver,
            conversation_id=conversation_id,
            content=content or {},
        )
        self._platform.send(message)
        return message

    def reply(
        self,
        message: Message,
        performative: Performative,
        content: dict[str, Any] | None = None,
    ) -> Message:
        return self.send(performative, message.sender, message.conversation_id, content)

    def register_service(self, service_type: str, service_name: str) -> None:
        svc = ServiceDescription(service_type, service_name)
        self._platform.register_service(self.agent_id, svc)

    def search_service(self, service_type: str) -> list[AgentId]:
        return self._platform.search_service(service_type)

    def lookup(self, name: str) -> Optional[AgentId]:
        return self._platform.lookup(name)

    def move(self, destination: Location) -> None:
        self._platform.move(self.agent_id, destination)

    def now_ms(self) -> float:
        return self._platform.clock.now_ms()
