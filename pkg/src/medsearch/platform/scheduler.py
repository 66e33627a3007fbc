"""
Schedulers decide when delivered messages are handled.

ThreadedScheduler gives each agent a worker thread draining its mailbox.
DeterministicScheduler runs every handler on the calling thread in
virtual-time order, so runs are reproducible while concurrent agents still
overlap in simulated time.
"""

import heapq
import itertools
import logging
import queue
import threading
from abc import ABC, abstractmethod
from concurrent.futures import Future
from typing import TYPE_CHECKING, Any, Callable, Optional

from .clock import Clock, RealClock, VirtualClock
from .messages import Message

if TYPE_CHECKING:
    from .runtime import AgentRecord, Platform

logger = logging.getLogger(__name__)

_STOP = None


class Scheduler(ABC):
    """Delivery and execution policy for one platform."""

    clock: Clock

    def __init__(self) -> None:
        self._platform: Optional["Platform"] = None

    def bind(self, platform: "Platform") -> None:
        self._platform = platform

    @property
    def platform(self) -> "Platform":
        if self._platform is None:
            raise RuntimeError("scheduler is not bound to a platform")
        return self._platform

    def start_agent(self, record: "AgentRecord") -> None:
        return None

    def stop_agent(self, record: "AgentRecord") -> None:
        return None

    @abstractmethod
    def post(self, record: "AgentRecord", message: Message, at_ms: float) -> None:
        """Schedule delivery of a message that has left its sender at ``at_ms``."""

    @abstractmethod
    def wait(self, future: Future, timeout_s: float) -> Any:
        """Block until a conversation future resolves and return its value."""

    def run_until_idle(self) -> None:
        return None

    def shutdown(self) -> None:
        return None


class ThreadedScheduler(Scheduler):
    """One worker thread and FIFO mailbox per agent."""

    def __init__(self) -> None:
        super().__init__()
        self.clock = RealClock()
        self._lock = threading.Lock()
        self._mailboxes: dict[str, queue.Queue] = {}
        self._threads: dict[str, threading.Thread] = {}

    def start_agent(self, record: "AgentRecord") -> None:
        name = record.agent_id.name
        mailbox: queue.Queue = queue.Queue()
        thread = threading.Thread(
            target=self._run,
            args=(name, mailbox),
            name=f"agent-{name}",
            daemon=True,
        )
        with self._lock:
            self._mailboxes[name] = mailbox
            self._threads[name] = thread
        thread.start()

    def stop_agent(self, record: "AgentRecord") -> None:
        with self._lock:
            mailbox = self._mailboxes.get(record.agent_id.name)
        if mailbox is not None:
            mailbox.put(_STOP)

    def post(self, record: "AgentRecord", message: Message, at_ms: float) -> None:
        self.platform._deliver(record, message, self._enqueue)

    def _enqueue(self, record: "AgentRecord", message: Message) -> None:
        with self._lock:
            mailbox = self._mailboxes[record.agent_id.name]
        mailbox.put(message)

    def _run(self, name: str, mailbox: queue.Queue) -> None:
        while True:
            message = mailbox.get()
            if message is _STOP:
                break
            self.platform._dispatch(name, message)

    def wait(self, future: Future, timeout_s: float) -> Any:
        return future.result(timeout=timeout_s)

    def shutdown(self) -> None:
        with self._lock:
            mailboxes = list(self._mailboxes.values())
            threads = list(self._threads.values())
        for mailbox in mailboxes:
            mailbox.put(_STOP)
        current = threading.current_thread()
        for thread in threads:
            if thread is not current:
                thread.join(timeout=5.0)


class DeterministicScheduler(Scheduler):
    """
    Discrete-event scheduler over a virtual clock.

    Pending deliveries sit in a heap ordered by arrival time, ties broken by
    posting order. A handler starts at max(arrival, end of the agent's
    previous handler) and may advance the clock by sleeping; everything it
    sends is stamped with its own current time.
    """

    def __init__(self) -> None:
        super().__init__()
        self.clock = VirtualClock()
        self._heap: list[tuple[float, int, str, Message]] = []
        self._counter = itertools.count()
        self._busy_until: dict[str, float] = {}
        self._horizon = 0.0

    def post(self, record: "AgentRecord", message: Message, at_ms: float) -> None:
        heapq.heappush(self._heap, (at_ms, next(self._counter), record.agent_id.name, message))
        self._horizon = max(self._horizon, at_ms)

    def pending(self) -> int:
        return len(self._heap)

    def run(self, until: Optional[Callable[[], bool]] = None) -> int:
        """
        Process deliveries in time order.

        Args:
            until: Stop as soon as this returns True

        Returns:
            Number of handlers executed
        """
        executed = 0
        while self._heap:
            if until is not None and until():
                break
            at_ms, _, name, message = heapq.heappop(self._heap)
            record = self.platform.agent_record(name)
            self.clock.set(at_ms)

            ready: list[Message] = []
            self.platform._deliver(record, message, lambda _r, m: ready.append(m))
            if not ready:
                continue

            start = max(at_ms, self._busy_until.get(name, 0.0))
            self.clock.set(start)
            self.platform._dispatch(name, message)
            finished = self.clock.now_ms()
            self._busy_until[name] = finished
            self._horizon = max(self._horizon, finished)
            executed += 1

        self.clock.set(self._horizon)
        return executed

    def run_until_idle(self) -> None:
        self.run()

    def wait(self, future: Future, timeout_s: float) -> Any:
        self.run(until=future.done)
        if not future.done():
            raise TimeoutError("conversation stalled: no pending deliveries left")
        return future.result(timeout=0)
