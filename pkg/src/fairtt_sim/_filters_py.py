"""Pure-Python windowed max/min filters (fallback backend).

Each filter keeps a monotonic deque of (value, timestamp) samples: a new
sample evicts every older sample it dominates, so the front of the deque
is always the running extreme.  A sample taken at time ``at`` counts as
in-window while ``at > now - window``.

Semantics must stay bit-identical to the compiled backend in
``_filters_c.pyx``; the two are compared sample-for-sample in the tests.
"""

from collections import deque

BACKEND = "python"


class WindowedMaxFilter:
    __slots__ = ("window", "_values", "_times")

    def __init__(self, window: int):
        self.window = window
        self._values = deque()
        self._times = deque()

    def update(self, value, now: int) -> None:
        values = self._values
        times = self._times
        while values and values[-1] <= value:
            values.pop()
            times.pop()
        values.append(value)
        times.append(now)
        cutoff = now - self.window
        while times[0] <= cutoff:
            times.popleft()
            values.popleft()

    def current(self, now: int):
        times = self._times
        values = self._values
        cutoff = now - self.window
        while times and times[0] <= cutoff:
            times.popleft()
            values.popleft()
        return values[0] if values else None

    def __len__(self) -> int:
        return len(self._values)


class WindowedMinFilter:
    __slots__ = ("window", "_values", "_times")

    def __init__(self, window: int):
        self.window = window
        self._values = deque()
        self._times = deque()

    def update(self, value, now: int) -> None:
        values = self._values
        times = self._times
        while values and values[-1] >= value:
            values.pop()
            times.pop()
        values.append(value)
        times.append(now)
        cutoff = now - self.window
        while times[0] <= cutoff:
            times.popleft()
            values.popleft()

    def current(self, now: int):
        times = self._times
        values = self._values
        cutoff = now - self.window
        while times and times[0] <= cutoff:
            times.popleft()
            values.popleft()
        return values[0] if values else None

    def __len__(self) -> int:
        return len(self._values)
