"""NEC2DQN agent: episodic-memory estimates blended into a DQN head.

Calls alternate between two branches on the agent's internal step counter:

* odd steps act on the blended value ``lam*Q_NEC + (1-lam)*Q_DQN``, record
  (s, a, r) in the episode trajectory and train the DQN head on the
  target-tagged replay D;
* even steps act on Q_DQN alone, store the full transition in replay E and
  train the DQN head toward ``r + gamma * Q_N2D(s', argmax_a Q_DQN(s', a))``.

At episode end, N-step returns over the trajectory are written to the DND
(while the change step has not been reached) and appended to D.
"""
from __future__ import annotations

import json
from dataclasses import asdict
from typing import Callable

import numpy as np

from .ddqn import AgentParams, EpsilonSchedule, epsilon_greedy, restore_rng, rng_state
from .dnd import DndStore, n_step_q
from .memory import RingBuffer, TargetSample, Trajectory, Transition
from .nn import DenseNet


def blend(q_nec: float | None, q_dqn: float, lam: float) -> float:
    """lam*Q_NEC + (1-lam)*Q_DQN; Q_DQN alone when there is no NEC estimate."""
    if q_nec is None or lam == 0.0:
        return q_dqn
    return lam * q_nec + (1.0 - lam) * q_dqn


class N2dAgent:
    kind = "n2d"

    def __init__(self, obs_width: int, n_actions: int, rng: np.random.Generator,
                 params: AgentParams | None = None, budget_steps: int = 1,
                 change_step: int | None = None):
        self.params = p = params or AgentParams()
        self.n_actions = n_actions
        self.rng = rng
        self.dqn = DenseNet.build([obs_width, *p.hidden, n_actions], rng)
        self.embed = DenseNet.build([obs_width, *p.embed_widths], rng)
        self.dnd = DndStore(n_actions, p.embed_widths[-1], capacity=p.dnd_capacity,
                            delta=p.dnd_delta, neighbors=p.dnd_neighbors, alpha=p.dnd_alpha)
        self.replay_d = RingBuffer(p.replay_capacity)
        self.replay_e = RingBuffer(p.replay_capacity)
        self.trajectory = Trajectory()
        self._traj_keys: list[np.ndarray] = []
        self.epsilon = EpsilonSchedule(p.eps_start, p.eps_end, int(p.eps_decay_fraction * budget_steps))
        # S only advances on the blended branch, i.e. every other call
        if change_step is None:
            change_step = int(p.change_step_fraction * budget_steps) // 2
        self.change_step = change_step
        self.t = 0  # calls to act
        self.S = 0  # blended-branch steps
        self.trace: list[str] | None = None

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def use_nec(self) -> bool:
        return self.S < self.change_step

    def lam(self) -> float:
        if not self.use_nec:
            return 0.0
        if self.params.constant_lambda is not None:
            return self.params.constant_lambda
        return max(0.0, 1.0 - self.S / self.change_step)

    def embedding(self, observation) -> np.ndarray:
        return self.embed.forward(observation)

    def q_dqn(self, observation) -> np.ndarray:
        return self.dqn.forward(observation)

    def q_nec(self, observation, action: int, h=None) -> float | None:
        if self.dnd.size(action) == 0:
            return None
        h = self.embedding(observation) if h is None else h
        return self.dnd.lookup(action, h)[0]

    def q_n2d(self, observation, action: int) -> float:
        q_dqn = float(self.q_dqn(observation)[action])
        lam = self.lam()
        if lam == 0.0:
            return q_dqn
        return blend(self.q_nec(observation, action), q_dqn, lam)

    def q_n2d_many(self, observation, actions) -> np.ndarray:
        q = self.q_dqn(observation)[actions].astype(np.float64)
        lam = self.lam()
        if lam == 0.0:
            return q
        h = self.embedding(observation)
        for i, a in enumerate(actions):
            q[i] = blend(self.q_nec(observation, int(a), h), q[i], lam)
        return q

    def _eps(self) -> float:
        return self.epsilon.value(self.t)

    def _log(self, event: str):
        if self.trace is not None:
            self.trace.append(event)

    def _train_on_d(self):
        batch = self.replay_d.sample(self.params.batch_size, self.rng)
        grads, _ = self.dqn.batch_gradient(np.stack([b.s for b in batch]),
                                           [b.y for b in batch], [b.a for b in batch])
        self.dqn.sgd_step(grads, self.params.lr)

    def e_targets(self, batch: list[Transition]) -> np.ndarray:
        s_next = np.stack([t.s_next for t in batch])
        best = np.argmax(self.dqn.forward(s_next), axis=1)
        y = np.empty(len(batch))
        for i, t in enumerate(batch):
            y[i] = t.r if t.done else t.r + self.gamma * self.q_n2d(t.s_next, int(best[i]))
        return y

    def _train_on_e(self):
        batch = self.replay_e.sample(self.params.batch_size, self.rng)
        y = self.e_targets(batch)
        grads, _ = self.dqn.batch_gradient(np.stack([t.s for t in batch]), y, [t.a for t in batch])
        self.dqn.sgd_step(grads, self.params.lr)

    def act(self, observation, legal_mask, step_fn: Callable):
        self.t += 1
        eps = self._eps()
        if self.t % 2 == 1:
            self._log("select:n2d")
            a = epsilon_greedy(lambda legal: self.q_n2d_many(observation, legal), legal_mask, eps, self.rng)
            outcome = step_fn(a)
            self._log("step")
            self.trajectory.append(observation, a, outcome.reward)
            self._traj_keys.append(self.embedding(observation))
            self._log("store:G")
            if len(self.replay_d) >= self.params.batch_size:
                self._train_on_d()
                self._log("train:D")
            self.S += 1
        else:
            self._log("select:dqn")
            a = epsilon_greedy(lambda legal: self.q_dqn(observation)[legal], legal_mask, eps, self.rng)
            outcome = step_fn(a)
            self._log("step")
            self.replay_e.push(Transition(observation, a, outcome.reward, outcome.next_observation, outcome.done))
            self._log("store:E")
            if len(self.replay_e) >= self.params.batch_size:
                self._train_on_e()
                self._log("train:E")
        return a, outcome

    def episode_targets(self) -> np.ndarray:
        """N-step returns over the trajectory; bootstrap 0 past the episode end."""
        steps = self.trajectory.steps
        rewards = [r for _, _, r in steps]
        N = self.params.n_step
        T = len(steps)
        y = np.empty(T)
        for t in range(T):
            end = min(t + N, T)
            if t + N < T:
                s_boot = steps[t + N][0]
                bootstrap = float(np.max(self.q_n2d_many(s_boot, np.arange(self.n_actions))))
            else:
                bootstrap = 0.0
            y[t] = n_step_q(rewards[t:end], self.gamma, bootstrap)
        return y

    def finish_episode(self) -> None:
        y = self.episode_targets()
        write_dnd = self.use_nec
        for (s, a, _), h, y_t in zip(self.trajectory, self._traj_keys, y):
            if write_dnd:
                self.dnd.write(a, h, y_t)
            self.replay_d.push(TargetSample(s, a, y_t))
        self.trajectory.clear()
        self._traj_keys.clear()

    def state_arrays(self) -> dict[str, np.ndarray]:
        arrays = {}
        arrays.update(self.dqn.state_arrays("dqn"))
        arrays.update(self.embed.state_arrays("embed"))
        arrays.update(self.dnd.state_arrays("dnd"))
        arrays["t"] = np.array(self.t)
        arrays["S"] = np.array(self.S)
        arrays["change_step"] = np.array(self.change_step)
        arrays["epsilon_decay_steps"] = np.array(self.epsilon.decay_steps)
        arrays["replay_d_size"] = np.array(len(self.replay_d))
        arrays["replay_e_size"] = np.array(len(self.replay_e))
        arrays["replay_capacity"] = np.array(self.replay_d.capacity)
        arrays["rng_state"] = rng_state(self.rng)
        arrays["params"] = np.array(json.dumps(asdict(self.params), sort_keys=True))
        return arrays

    def load_arrays(self, arrays) -> None:
        self.dqn = DenseNet.from_arrays(arrays, "dqn")
        self.embed = DenseNet.from_arrays(arrays, "embed")
        self.dnd.load_arrays(arrays, "dnd")
        self.t = int(arrays["t"])
        self.S = int(arrays["S"])
        self.change_step = int(arrays["change_step"])
        self.epsilon.decay_steps = int(arrays["epsilon_decay_steps"])
        restore_rng(self.rng, arrays["rng_state"])
