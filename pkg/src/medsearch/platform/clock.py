"""
Platform clocks: a real monotonic clock and a virtual millisecond clock.
"""

import time
from typing import Protocol


class Clock(Protocol):
    """Time source used for latency injection and measurement."""

    def now_ms(self) -> float: ...

    def sleep_ms(self, ms: float) -> None: ...


class RealClock:
    """Monotonic wall clock; sleeping blocks the calling thread."""

    def now_ms(self) -> float:
        return time.monotonic() * 1000.0

    def sleep_ms(self, ms: float) -> None:
        if ms > 0:
            time.sleep(ms / 1000.0)


class VirtualClock:
    """
    Simulated clock for the deterministic scheduler.

    Only one handler runs at a time, so the clock holds the time of
    whichever agent is currently executing. Sleeping advances it instantly.
    """

    def __init__(self, start_ms: float = 0.0):
        self._now = start_ms

    def now_ms(self) -> float:
        return self._now

    def sleep_ms(self, ms: float) -> None:
        if ms > 0:
            self._now += ms

    def set(self, ms: float) -> None:
        """Jump to the start time of the next handler."""
        self._now = ms
