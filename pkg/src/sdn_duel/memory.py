"""Replay buffers and per-episode trajectories."""
from __future__ import annotations

from typing import Any, Iterator

import numpy as np


def _frozen(obs) -> np.ndarray:
    arr = np.array(obs, dtype=np.uint8, copy=True)
    arr.setflags(write=False)
    return arr


class Transition:
    __slots__ = ("s", "a", "r", "s_next", "done")

    def __init__(self, s, a: int, r: float, s_next, done: bool):
        self.s = _frozen(s)
        self.a = int(a)
        self.r = float(r)
        self.s_next = _frozen(s_next)
        self.done = bool(done)

    def __repr__(self):
        return f"Transition(a={self.a}, r={self.r}, done={self.done})"


class TargetSample:
    """(s, a, y): a state-action pair tagged with a precomputed regression target."""

    __slots__ = ("s", "a", "y")

    def __init__(self, s, a: int, y: float):
        self.s = _frozen(s)
        self.a = int(a)
        self.y = float(y)


class RingBuffer:
    """Fixed-capacity FIFO store; the oldest entry is overwritten first."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._items: list[Any] = []
        self._head = 0  # index of the oldest entry once full

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[Any]:
        """Oldest to newest."""
        n = len(self._items)
        for i in range(n):
            yield self._items[(self._head + i) % n]

    def push(self, item) -> None:
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._head] = item
            self._head = (self._head + 1) % self.capacity

    def sample(self, k: int, rng: np.random.Generator) -> list:
        """k entries drawn uniformly with replacement."""
        if not self._items:
            raise IndexError("cannot sample from an empty buffer")
        idx = rng.integers(0, len(self._items), size=k)
        return [self._items[i] for i in idx]


class Trajectory:
    def __init__(self):
        self.steps: list[tuple[np.ndarray, int, float]] = []

    def append(self, s, a: int, r: float) -> None:
        self.steps.append((_frozen(s), int(a), float(r)))

    def clear(self) -> None:
        self.steps.clear()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)
