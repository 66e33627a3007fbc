"""
The agent platform: lifecycle, directory, messaging, mobility and tracing.
"""

import json
import logging
import threading
from collections import Counter
from concurrent.futures import Future
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

import msgpack

from ..errors import MigrationAborted, NoSuchLocation, UnknownAgent
from .behavior import AgentBehavior, AgentContext
from .clock import Clock
from .messages import (
    AgentId,
    Location,
    Message,
    Performative,
    ServiceDescription,
    TraceEvent,
)
from .registry import AgentRegistry
from .scheduler import DeterministicScheduler, Scheduler, ThreadedScheduler

logger = logging.getLogger(__name__)


@dataclass
class AgentRecord:
    """Runtime bookkeeping for one agent."""

    agent_id: AgentId
    behavior: AgentBehavior
    context: AgentContext
    location: Optional[Location] = None
    alive: bool = True
    migrating: bool = False
    in_transit: list[Message] = field(default_factory=list)


class Platform:
    """
    Hosts agents, routes their messages and moves them between locations.

    Costs are charged on the platform clock: every send blocks the sender
    for ``c_msg`` ms, every hop blocks the migrating agent for ``c_move``
    ms, and site collection is stretched by the contention factor.
    """

    def __init__(
        self,
        locations: Iterable[Location] = (),
        scheduler: Optional[Scheduler] = None,
        c_msg: float = 0.0,
        c_move: float = 0.0,
        kappa: float = 0.0,
        trace: bool = True,
    ):
        """
        Initialize the platform.

        Args:
            locations: Places agents can move to (one site each)
            scheduler: Execution policy; threaded by default
            c_msg: Per-message communication cost in ms
            c_move: Per-migration cost in ms
            kappa: Contention coefficient applied to site collection
            trace: Whether the sniffer starts enabled
        """
        self._scheduler = scheduler or ThreadedScheduler()
        self._scheduler.bind(self)
        self.registry = AgentRegistry()
        self.c_msg = c_msg
        self.c_move = c_move
        self.kappa = kappa

        self._lock = threading.RLock()
        self._locations: dict[str, Location] = {}
        for loc in locations:
            if loc.location_id in self._locations:
                raise ValueError(f"duplicate location id: {loc.location_id}")
            self._locations[loc.location_id] = loc

        self._records: dict[str, AgentRecord] = {}
        self._next_seq = 0
        self._tracing = trace
        self._trace: list[TraceEvent] = []
        self._delivered: Counter[str] = Counter()
        self._hops: Counter[str] = Counter()
        self._failures_returned = 0
        self._conversation_counter = 0
        self._conversations: dict[str, Future] = {}

    # ------------------------------------------------------------------
    # Properties
    # ------------------------------------------------------------------

    @property
    def clock(self) -> Clock:
        return self._scheduler.clock

    @property
    def scheduler(self) -> Scheduler:
        return self._scheduler

    @property
    def deterministic(self) -> bool:
        return isinstance(self._scheduler, DeterministicScheduler)

    @property
    def delivered_total(self) -> int:
        with self._lock:
            return self._next_seq

    @property
    def failures_returned(self) -> int:
        with self._lock:
            return self._failures_returned

    # ------------------------------------------------------------------
    # Lifecycle (white pages)
    # ------------------------------------------------------------------

    def spawn_agent(
        self,
        name: str,
        behavior: AgentBehavior,
        home: Optional[Location] = None,
    ) -> AgentId:
        """
        Create an agent and make it runnable.

        Args:
            name: Unique name among live agents
            behavior: Message handler plus optional hooks
            home: Starting location, if any

        Returns:
            The new AgentId (incarnation 1)

        Raises:
            NameTaken: a live agent already uses this name
            NoSuchLocation: home is not a platform location
        """
        if home is not None and home.location_id not in self._locations:
            raise NoSuchLocation(home.location_id)

        agent_id = AgentId(name, 1)
        with self._lock:
            self.registry.add_agent(agent_id)
            record = AgentRecord(
                agent_id=agent_id,
                behavior=behavior,
                context=AgentContext(self, name),
                location=home,
            )
            self._records[name] = record
        self._scheduler.start_agent(record)
        behavior.setup(record.context)
        logger.debug("Spawned %s at %s", agent_id, home.location_id if home else "-")
        return agent_id

    def kill_agent(self, agent_id: AgentId) -> None:
        """Terminate an agent. Later messages to it bounce as FAILURE."""
        with self._lock:
            record = self._records.get(agent_id.name)
            if record is None or not record.alive:
                return
            record.alive = False
            self.registry.mark_dead(agent_id.name)
        self._scheduler.stop_agent(record)
        logger.debug("Killed %s", record.agent_id)

    def agent_record(self, name: str) -> AgentRecord:
        with self._lock:
            record = self._records.get(name)
        if record is None:
            raise UnknownAgent(name)
        return record

    def lookup(self, name: str) -> Optional[AgentId]:
        """Current AgentId of a live agent."""
        return self.registry.lookup(name)

    def live_agents(self) -> list[AgentId]:
        return self.registry.live_agents()

    # ------------------------------------------------------------------
    # Directory (yellow pages)
    # ------------------------------------------------------------------

    def register_service(self, agent_id: AgentId, svc: ServiceDescription) -> None:
        self.registry.register_service(agent_id, svc)

    def deregister_service(self, agent_id: AgentId, service_type: str) -> bool:
        return self.registry.deregister_service(agent_id, service_type)

    def search_service(self, service_type: str) -> list[AgentId]:
        return self.registry.search_service(service_type)

    # ------------------------------------------------------------------
    # Locations and mobility
    # ------------------------------------------------------------------

    def get_available_locations(self) -> list[Location]:
        """All places on the platform, ordered by location_id."""
        with self._lock:
            return [self._locations[k] for k in sorted(self._locations)]

    def location(self, location_id: str) -> Location:
        try:
            return self._locations[location_id]
        except KeyError:
            raise NoSuchLocation(location_id) from None

    def move(self, agent_id: AgentId, destination: Location) -> None:
        """
        Migrate an agent and run its after-move hook at the destination.

        The behavior state is serialized with msgpack and restored from the
        bytes. Moving to the current location skips the transfer but still
        runs the hook once.

        Raises:
            NoSuchLocation: destination unknown
            MigrationAborted: the agent died in transfer; it stays at origin
        """
        record = self.agent_record(agent_id.name)
        if not record.alive:
            raise UnknownAgent(f"agent not live: {agent_id.name}")
        dest = self.location(destination.location_id)

        same_place = record.location is not None and record.location.location_id == dest.location_id
        if not same_place:
            self._transfer(record, dest)

        record.behavior.after_move(record.context, dest)

    def _transfer(self, record: AgentRecord, dest: Location) -> None:
        name = record.agent_id.name
        with self._lock:
            record.migrating = True
        try:
            blob = msgpack.packb(record.behavior.snapshot(), use_bin_type=True)
            self.clock.sleep_ms(self.c_move)
            with self._lock:
                if not record.alive:
                    raise MigrationAborted(f"{name} died while moving to {dest.location_id}")
                record.behavior.restore(msgpack.unpackb(blob, raw=False))
                record.agent_id = record.agent_id.next_incarnation()
                record.location = dest
                self.registry.update_agent(record.agent_id)
                self._hops[name] += 1
            logger.debug(
                "%s arrived at %s (%d bytes)", record.agent_id, dest.location_id, len(blob)
            )
        finally:
            with self._lock:
                record.migrating = False
                held, record.in_transit = record.in_transit, []
            for message in held:
                self._scheduler.post(record, message, self.clock.now_ms())

    def hop_count(self, name: str) -> int:
        with self._lock:
            return self._hops[name]

    # ------------------------------------------------------------------
    # Contention
    # ------------------------------------------------------------------

    def contending_agents(self) -> int:
        with self._lock:
            return sum(1 for r in self._records.values() if r.alive and r.behavior.contends)

    def contention_factor(self) -> float:
        return 1.0 + self.kappa * self.contending_agents()

    # ------------------------------------------------------------------
    # Messaging
    # ------------------------------------------------------------------

    def send(self, message: Message) -> None:
        """
        Enqueue a message for delivery.

        Delivery is exactly once and FIFO per (sender, receiver) pair. A
        message to a dead or unknown agent is answered with one FAILURE to
        the sender instead.
        """
        with self._lock:
            record = self._records.get(message.receiver.name)
            deliverable = record is not None and record.alive
        if not deliverable:
            self._bounce(message, "unknown receiver" if record is None else "receiver is dead")
            return

        self.clock.sleep_ms(self.c_msg)
        self._scheduler.post(record, message, self.clock.now_ms())

    def _deliver(
        self,
        record: AgentRecord,
        message: Message,
        enqueue: Callable[[AgentRecord, Message], None],
    ) -> None:
        """Assign seq, trace and hand to the mailbox; called by schedulers."""
        with self._lock:
            if record.alive and record.migrating:
                record.in_transit.append(message)
                return
            if record.alive:
                message.seq = self._next_seq
                self._next_seq += 1
                self._delivered[message.conversation_id] += 1
                if self._tracing:
                    self._trace.append(
                        TraceEvent(
                            seq=message.seq,
                            timestamp=self.clock.now_ms(),
                            performative=message.performative,
                            sender=message.sender.name,
                            receiver=message.receiver.name,
                            conversation_id=message.conversation_id,
                        )
                    )
                enqueue(record, message)
                return
        self._bounce(message, "receiver died")

    def _bounce(self, message: Message, reason: str) -> None:
        if message.performative is Performative.FAILURE:
            logger.debug("Dropping undeliverable FAILURE %s: %s", message.msg_id, reason)
            return
        with self._lock:
            sender = self._records.get(message.sender.name)
            if sender is None or not sender.alive:
                logger.warning("Dropping message %s: %s, sender gone", message.msg_id, reason)
                return
            self._failures_returned += 1
        failure = Message(
            performative=Performative.FAILURE,
            sender=message.receiver,
            receiver=sender.agent_id,
            conversation_id=message.conversation_id,
            content={
                "reason": reason,
                "undelivered": message.msg_id,
                "performative": message.performative.value,
            },
        )
        logger.info("Returning FAILURE to %s: %s (%s)", sender.agent_id, reason, message.receiver)
        self._scheduler.post(sender, failure, self.clock.now_ms())

    def _dispatch(self, name: str, message: Message) -> None:
        """Run one handler; called by schedulers, never concurrently per agent."""
        record = self.agent_record(name)
        if not record.alive:
            return
        try:
            record.behavior.handle(record.context, message)
        except Exception as e:
            logger.exception("%s failed handling %s", record.agent_id, message.performative.value)
            if message.performative is Performative.REQUEST and record.alive:
                try:
                    record.context.reply(
                        message,
                        Performative.FAILURE,
                        {"error": type(e).__name__, "reason": f"{type(e).__name__}: {e}"},
                    )
                except Exception:
                    logger.exception("Could not report failure to %s", message.sender)

    def delivered_count(self, conversation_id: str) -> int:
        with self._lock:
            return self._delivered[conversation_id]

    # ------------------------------------------------------------------
    # Conversations awaited from outside the platform
    # ------------------------------------------------------------------

    def open_conversation(self, prefix: str = "conv") -> str:
        with self._lock:
            self._conversation_counter += 1
            conversation_id = f"{prefix}-{self._conversation_counter:06d}"
            self._conversations[conversation_id] = Future()
        return conversation_id

    def resolve_conversation(self, conversation_id: str, value: Any) -> None:
        with self._lock:
            future = self._conversations.get(conversation_id)
        if future is not None and not future.done():
            future.set_result(value)

    def fail_conversation(self, conversation_id: str, error: BaseException) -> None:
        with self._lock:
            future = self._conversations.get(conversation_id)
        if future is not None and not future.done():
            future.set_exception(error)

    def wait_conversation(self, conversation_id: str, timeout_s: float = 60.0) -> Any:
        with self._lock:
            future = self._conversations[conversation_id]
        try:
            return self._scheduler.wait(future, timeout_s)
        finally:
            with self._lock:
                self._conversations.pop(conversation_id, None)

    def run_until_idle(self) -> None:
        """Drain pending deliveries (deterministic scheduler only)."""
        self._scheduler.run_until_idle()

    # ------------------------------------------------------------------
    # Sniffer
    # ------------------------------------------------------------------

    def enable_trace(self) -> None:
        with self._lock:
            self._tracing = True
            self._trace = []

    def sniffer_trace(self) -> list[TraceEvent]:
        """Delivered messages since tracing was enabled, ordered by seq."""
        with self._lock:
            return sorted(self._trace, key=lambda e: e.seq)

    def export_trace(self, path: str | Path) -> int:
        """Write the trace as JSON lines. Returns the number of records."""
        events = self.sniffer_trace()
        with open(path, "w", encoding="utf-8") as f:
            for event in events:
                f.write(json.dumps(event.to_record()) + "\n")
        return len(events)

    def shutdown(self) -> None:
        with self._lock:
            for record in self._records.values():
                record.alive = False
        self._scheduler.shutdown()
