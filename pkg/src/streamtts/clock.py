"""Injected clocks.

Latency math is never read from an ambient clock: every component takes a
``Clock`` so the whole timing model can run on a virtual clock and be
checked exactly. ``advance_ns`` is how simulated work reports its cost; on
the wall clock it is a no-op because real work already took real time.
"""

from __future__ import annotations

import time
from typing import Protocol


class Clock(Protocol):
    def now_ns(self) -> int: ...
    def advance_ns(self, delta_ns: int) -> None: ...


class SimulatedClock:
    """Virtual monotonic clock starting at zero."""

    __slots__ = ("_now",)

    def __init__(self, start_ns: int = 0) -> None:
        self._now = start_ns

    def now_ns(self) -> int:
        return self._now

    def advance_ns(self, delta_ns: int) -> None:
        if delta_ns < 0:
            raise ValueError("clock cannot move backwards")
        self._now += delta_ns


class MonotonicClock:
    """Wall clock; simulated costs are ignored."""

    __slots__ = ()

    def now_ns(self) -> int:
        return time.monotonic_ns()

    def advance_ns(self, delta_ns: int) -> None:
        pass
