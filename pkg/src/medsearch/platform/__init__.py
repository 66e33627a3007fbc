"""Agent platform: lifecycle, directory, messaging, mobility, sniffer trace."""

from .behavior import AgentBehavior, AgentContext
from .clock import Clock, RealClock, VirtualClock
from .messages import AgentId, Location, Message, Performative, ServiceDescription, TraceEvent
from .runtime import AgentRecord, Platform
from .scheduler import DeterministicScheduler, Scheduler, ThreadedScheduler

__all__ = [
    "AgentBehavior",
    "AgentContext",
    "AgentId",
    "AgentRecord",
    "Clock",
    "DeterministicScheduler",
    "Location",
    "Message",
    "Performative",
    "Platform",
    "RealClock",
    "Scheduler",
    "ServiceDescription",
    "ThreadedScheduler",
    "TraceEvent",
    "VirtualClock",
    "make_scheduler",
]


def make_scheduler(kind: str) -> Scheduler:
    """Build a scheduler from its config name ("threaded" or "deterministic")."""
    if kind == "deterministic":
        return DeterministicScheduler()
    if kind == "threaded":
        return ThreadedScheduler()
    raise ValueError(f"unknown scheduler: {kind!r}")
