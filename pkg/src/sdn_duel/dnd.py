"""Differentiable neural dictionary: per-action episodic key/value memory.

Lookups return a kernel-weighted average of the values stored under the p
nearest keys, with kernel ``1 / (||h - h_i||^2 + delta)``. Writes either
nudge an existing entry toward the new target (exact key match) or append,
evicting the least recently used entry once an action's memory is full.
"""
from __future__ import annotations

import numpy as np


class EmptyMemoryError(LookupError):
    pass


def kernel(h, h_i, delta: float) -> float:
    h = np.asarray(h, dtype=np.float64)
    h_i = np.asarray(h_i, dtype=np.float64)
    if h.shape != h_i.shape:
        raise ValueError(f"embedding widths differ: {h.shape} vs {h_i.shape}")
    diff = h - h_i
    return 1.0 / (float(diff @ diff) + delta)


def n_step_q(rewards, gamma: float, bootstrap: float) -> float:
    """sum_j gamma**j * r_j + gamma**N * bootstrap."""
    if len(rewards) == 0:
        raise ValueError("rewards must be non-empty")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    total = 0.0
    discount = 1.0
    for r in rewards:
        total += discount * r
        discount *= gamma
    return total + discount * bootstrap


class _ActionMemory:
    def __init__(self, width: int, capacity: int):
        self.capacity = capacity
        self.keys = np.empty((min(capacity, 64), width))
        self.values = np.empty(min(capacity, 64))
        self.stamps = np.empty(min(capacity, 64), dtype=np.int64)
        self.size = 0
        self._index: dict[bytes, int] = {}

    def _grow(self):
        n = min(self.capacity, 2 * len(self.values))
        for name in ("keys", "values", "stamps"):
            old = getattr(self, name)
            new = np.empty((n,) + old.shape[1:], dtype=old.dtype)
            new[:self.size] = old[:self.size]
            setattr(self, name, new)


class DndStore:
    def __init__(self, n_actions: int, key_width: int, capacity: int = 100_000,
                 delta: float = 1e-3, neighbors: int | None = 50, alpha: float = 0.1):
        if delta <= 0:
            raise ValueError("delta must be positive")
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.n_actions = n_actions
        self.key_width = key_width
        self.capacity = capacity
        self.delta = delta
        self.neighbors = neighbors  # None = exhaustive
        self.alpha = alpha
        self._clock = 0
        self._mem = [_ActionMemory(key_width, capacity) for _ in range(n_actions)]

    def size(self, a: int) -> int:
        return self._mem[a].size

    def __len__(self) -> int:
        return sum(m.size for m in self._mem)

    def entries(self, a: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        m = self._mem[a]
        return m.keys[:m.size].copy(), m.values[:m.size].copy(), m.stamps[:m.size].copy()

    def _tick(self) -> int:
        self._clock += 1
        return self._clock

    def weights(self, a: int, h) -> tuple[np.ndarray, np.ndarray]:
        """Indices of the selected neighbours and their normalised kernel weights."""
        m = self._mem[a]
        if m.size == 0:
            raise EmptyMemoryError(f"no memories stored for action {a}")
        h = np.asarray(h, dtype=np.float64)
        if h.shape != (self.key_width,):
            raise ValueError(f"key width {h.shape} != ({self.key_width},)")
        diff = m.keys[:m.size] - h
        d2 = np.einsum("ij,ij->i", diff, diff)
        p = self.neighbors
        if p is None or m.size <= p:
            idx = np.arange(m.size)
        else:
            idx = np.argpartition(d2, p - 1)[:p]
            idx.sort()
        k = 1.0 / (d2[idx] + self.delta)
        return idx, k / k.sum()

    def lookup(self, a: int, h) -> tuple[float, np.ndarray]:
        idx, w = self.weights(a, h)
        m = self._mem[a]
        m.stamps[idx] = self._tick()
        return float(w @ m.values[idx]), idx

    def peek(self, a: int, h) -> float:
        """Lookup without touching recency stamps."""
        idx, w = self.weights(a, h)
        return float(w @ self._mem[a].values[idx])

    def write(self, a: int, h, q_target: float) -> None:
        m = self._mem[a]
        h = np.asarray(h, dtype=np.float64)
        key = h.tobytes()
        stamp = self._tick()
        i = m._index.get(key)
        if i is not None:
            m.values[i] += self.alpha * (q_target - m.values[i])
            m.stamps[i] = stamp
            return
        if m.size == m.capacity:
            i = int(np.argmin(m.stamps[:m.size]))
            del m._index[m.keys[i].tobytes()]
        else:
            if m.size == len(m.values):
                m._grow()
            i = m.size
            m.size += 1
        m.keys[i] = h
        m.values[i] = q_target
        m.stamps[i] = stamp
        m._index[key] = i

    def state_arrays(self, prefix: str) -> dict[str, np.ndarray]:
        arrays = {f"{prefix}.clock": np.array(self._clock)}
        for a, m in enumerate(self._mem):
            arrays[f"{prefix}.{a}.keys"] = m.keys[:m.size]
            arrays[f"{prefix}.{a}.values"] = m.values[:m.size]
            arrays[f"{prefix}.{a}.stamps"] = m.stamps[:m.size]
        return arrays

    def load_arrays(self, arrays, prefix: str) -> None:
        self._clock = int(arrays[f"{prefix}.clock"])
        for a, m in enumerate(self._mem):
            keys = np.asarray(arrays[f"{prefix}.{a}.keys"], dtype=np.float64)
            n = len(keys)
            cap = max(n, min(m.capacity, 64))
            m.keys = np.empty((cap, self.key_width))
            m.values = np.empty(cap)
            m.stamps = np.empty(cap, dtype=np.int64)
            m.keys[:n] = keys
            m.values[:n] = arrays[f"{prefix}.{a}.values"]
            m.stamps[:n] = arrays[f"{prefix}.{a}.stamps"]
            m.size = n
            m._index = {m.keys[i].tobytes(): i for i in range(n)}
