"""Double DQN agent: online net selects the bootstrap action, target net scores it."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .memory import RingBuffer, Transition
from .nn import DenseNet


@dataclass
class AgentParams:
    gamma: float = 0.99
    lr: float = 1e-3
    tau: float = 1e-3
    batch_size: int = 32
    replay_capacity: int = 50_000
    hidden: tuple[int, ...] = (128, 128)
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay_fraction: float = 0.2
    # N2D only
    embed_widths: tuple[int, ...] = (64, 32)
    change_step_fraction: float = 0.5
    n_step: int = 100
    dnd_capacity: int = 100_000
    dnd_delta: float = 1e-3
    dnd_neighbors: int | None = 50
    dnd_alpha: float = 0.1
    constant_lambda: float | None = None


@dataclass
class EpsilonSchedule:
    """Linear decay from start to end over decay_steps, then constant."""

    start: float = 1.0
    end: float = 0.05
    decay_steps: int = 1

    def value(self, step: int) -> float:
        if self.decay_steps <= 0 or step >= self.decay_steps:
            return self.end
        return self.start + (self.end - self.start) * step / self.decay_steps


def epsilon_greedy(q_fn: Callable[[np.ndarray], np.ndarray], legal_mask, epsilon: float,
                   rng: np.random.Generator) -> int:
    """Uniform legal action with prob. epsilon, else the lowest-index legal argmax.

    ``q_fn`` maps the array of legal indices to their Q-values and is only
    called on the greedy branch.
    """
    legal = np.flatnonzero(legal_mask)
    if legal.size == 0:
        raise ValueError("no legal actions")
    if rng.random() < epsilon:
        return int(legal[rng.integers(legal.size)])
    return int(legal[np.argmax(q_fn(legal))])


def rng_state(rng: np.random.Generator) -> np.ndarray:
    return np.array(json.dumps(rng.bit_generator.state, sort_keys=True))


def restore_rng(rng: np.random.Generator, blob) -> None:
    rng.bit_generator.state = json.loads(str(blob))


class DdqnAgent:
    kind = "ddqn"

    def __init__(self, obs_width: int, n_actions: int, rng: np.random.Generator,
                 params: AgentParams | None = None, budget_steps: int = 1):
        self.params = p = params or AgentParams()
        self.n_actions = n_actions
        self.rng = rng
        self.online = DenseNet.build([obs_width, *p.hidden, n_actions], rng)
        self.target = self.online.copy()
        self.replay = RingBuffer(p.replay_capacity)
        self.epsilon = EpsilonSchedule(p.eps_start, p.eps_end, int(p.eps_decay_fraction * budget_steps))
        self.steps = 0
        self.last_loss: float | None = None

    @property
    def gamma(self) -> float:
        return self.params.gamma

    def select_action(self, observation, legal_mask, epsilon: float | None = None) -> int:
        eps = self.epsilon.value(self.steps) if epsilon is None else epsilon
        return epsilon_greedy(lambda legal: self.online.forward(observation)[legal],
                              legal_mask, eps, self.rng)

    def double_q_targets(self, rewards, s_next, dones) -> np.ndarray:
        rewards = np.asarray(rewards, dtype=np.float64)
        s_next = np.atleast_2d(np.asarray(s_next, dtype=np.float64))
        best = np.argmax(self.online.forward(s_next), axis=1)
        evaluated = self.target.forward(s_next)[np.arange(len(best)), best]
        return np.where(np.asarray(dones, dtype=bool), rewards, rewards + self.gamma * evaluated)

    def double_q_target(self, t: Transition) -> float:
        return float(self.double_q_targets([t.r], [t.s_next], [t.done])[0])

    def train_step(self, batch_size: int | None = None) -> float:
        if len(self.replay) == 0:
            raise IndexError("replay buffer is empty")
        batch = self.replay.sample(batch_size or self.params.batch_size, self.rng)
        S = np.stack([t.s for t in batch])
        y = self.double_q_targets([t.r for t in batch], np.stack([t.s_next for t in batch]),
                                  [t.done for t in batch])
        grads, td = self.online.batch_gradient(S, y, [t.a for t in batch])
        self.online.sgd_step(grads, self.params.lr)
        self.target.soft_update(self.online, self.params.tau)
        self.last_loss = float(np.mean(td ** 2))
        return self.last_loss

    def act(self, observation, legal_mask, step_fn: Callable):
        a = self.select_action(observation, legal_mask)
        outcome = step_fn(a)
        self.replay.push(Transition(observation, a, outcome.reward, outcome.next_observation, outcome.done))
        if len(self.replay) >= self.params.batch_size:
            self.train_step()
        self.steps += 1
        return a, outcome

    def finish_episode(self) -> None:
        pass

    def state_arrays(self) -> dict[str, np.ndarray]:
        arrays = {}
        arrays.update(self.online.state_arrays("online"))
        arrays.update(self.target.state_arrays("target"))
        arrays["steps"] = np.array(self.steps)
        arrays["epsilon_decay_steps"] = np.array(self.epsilon.decay_steps)
        arrays["replay_size"] = np.array(len(self.replay))
        arrays["replay_capacity"] = np.array(self.replay.capacity)
        arrays["rng_state"] = rng_state(self.rng)
        arrays["params"] = np.array(json.dumps(asdict(self.params), sort_keys=True))
        return arrays

    def load_arrays(self, arrays) -> None:
        self.online = DenseNet.from_arrays(arrays, "online")
        self.target = DenseNet.from_arrays(arrays, "target")
        self.steps = int(arrays["steps"])
        self.epsilon.decay_steps = int(arrays["epsilon_decay_steps"])
        restore_rng(self.rng, arrays["rng_state"])
