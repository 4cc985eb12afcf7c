"""Turn-based zero-sum attacker/defender game on a simulated network."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .topology import N_BACKUPS, NetworkState, TopologyConfig, attack_frontier, encode, initial_state


class GameError(RuntimeError):
    pass


class Role(str, enum.Enum):
    ATTACKER = "attacker"
    DEFENDER = "defender"

    @property
    def other(self) -> Role:
        return Role.DEFENDER if self is Role.ATTACKER else Role.ATTACKER


class ActionKind(str, enum.Enum):
    COMPROMISE = "compromise"
    ISOLATE_PATCH = "isolate_patch"
    RECONNECT = "reconnect"
    MIGRATE = "migrate"
    NOOP = "noop"


class GameAction(NamedTuple):
    kind: ActionKind
    target: int | None = None  # host id, or backup slot for MIGRATE


def action_count(role: Role, host_count: int) -> int:
    if role is Role.ATTACKER:
        return host_count
    return 2 * host_count + N_BACKUPS + 1


def decode_action(role: Role, index: int, host_count: int) -> GameAction:
    n = action_count(role, host_count)
    if not isinstance(index, (int, np.integer)) or not 0 <= index < n:
        raise GameError(f"action index {index!r} out of range for {role.value} (0..{n - 1})")
    index = int(index)
    if role is Role.ATTACKER:
        return GameAction(ActionKind.COMPROMISE, index)
    H = host_count
    if index < H:
        return GameAction(ActionKind.ISOLATE_PATCH, index)
    if index < 2 * H:
        return GameAction(ActionKind.RECONNECT, index - H)
    if index < 2 * H + N_BACKUPS:
        return GameAction(ActionKind.MIGRATE, index - 2 * H)
    return GameAction(ActionKind.NOOP)


def encode_action(role: Role, action: GameAction, host_count: int) -> int:
    H = host_count
    kind, target = action
    if role is Role.ATTACKER:
        if kind is not ActionKind.COMPROMISE:
            raise GameError(f"attacker cannot play {kind.value}")
        return target
    offsets = {ActionKind.ISOLATE_PATCH: 0, ActionKind.RECONNECT: H, ActionKind.MIGRATE: 2 * H}
    if kind is ActionKind.NOOP:
        return 2 * H + N_BACKUPS
    if kind not in offsets:
        raise GameError(f"defender cannot play {kind.value}")
    return offsets[kind] + target


@dataclass
class Scoreboard:
    defender_score: int
    attacker_score: int


@dataclass(frozen=True)
class TurnOutcome:
    reward: int
    next_observation: np.ndarray
    done: bool
    winner: Role | None
    defender_turns_so_far: int


class GameSession:
    """One game between an attacker and a defender. The attacker moves first."""

    def __init__(self, cfg: TopologyConfig, turn_cap_per_agent: int):
        if turn_cap_per_agent < 1:
            raise GameError("turn_cap_per_agent must be >= 1")
        self.cfg = cfg
        self.turn_cap_per_agent = turn_cap_per_agent
        self.state: NetworkState = initial_state(cfg)
        self.scores = Scoreboard(cfg.s_max, 0)
        self.to_move = Role.ATTACKER
        self.turn = 0
        self.defender_turns = 0
        self.attacker_turns = 0
        self.winner: Role | None = None
        self._frontier = attack_frontier(self.state, cfg)

    @property
    def done(self) -> bool:
        return self.winner is not None

    @property
    def frontier(self) -> set[int]:
        return set(self._frontier)

    def observation(self) -> np.ndarray:
        return encode(self.state, self.cfg)

    def _require_turn(self, role: Role):
        if self.done:
            raise GameError("game is over")
        if role is not self.to_move:
            raise GameError(f"it is the {self.to_move.value}'s turn, not the {role.value}'s")

    def legal_actions(self, role: Role) -> set[int]:
        self._require_turn(role)
        if role is Role.ATTACKER:
            return set(self._frontier)
        H = self.cfg.host_count
        legal = set(range(action_count(role, H)))
        for slot, host in enumerate(self.cfg.backup_hosts):
            if self.state.compromised[host]:
                legal.discard(2 * H + slot)
        return legal

    def legal_mask(self, role: Role) -> np.ndarray:
        mask = np.zeros(action_count(role, self.cfg.host_count), dtype=bool)
        mask[list(self.legal_actions(role))] = True
        return mask

    def _transfer(self, to: Role):
        sb = self.scores
        if to is Role.ATTACKER and sb.defender_score > 0:
            sb.defender_score -= 1
            sb.attacker_score += 1
        elif to is Role.DEFENDER and sb.attacker_score > 0:
            sb.attacker_score -= 1
            sb.defender_score += 1

    def step(self, role: Role, action_index: int) -> TurnOutcome:
        self._require_turn(role)
        cfg, st = self.cfg, self.state
        kind, target = decode_action(role, action_index, cfg.host_count)
        reward = 0
        topology_changed = False

        if kind is ActionKind.COMPROMISE:
            if target in self._frontier:
                st.compromised[target] = True
                st.flags[target] = True
                self._transfer(Role.ATTACKER)
                reward = 1
                topology_changed = True
            else:
                reward = -1
        elif kind is ActionKind.ISOLATE_PATCH:
            st.link_active[list(cfg.host_incident[target])] = False
            if st.compromised[target]:
                st.compromised[target] = False
                st.flags[target] = False
                self._transfer(Role.DEFENDER)
                reward = 1
            else:
                reward = -1
            topology_changed = True
        elif kind is ActionKind.RECONNECT:
            st.link_active[list(cfg.host_incident[target])] = True
            topology_changed = True
        elif kind is ActionKind.MIGRATE:
            host = cfg.backup_hosts[target]
            if st.compromised[host]:
                reward = -1
            else:
                st.server_at = host

        if topology_changed:
            self._frontier = attack_frontier(st, cfg)

        self.turn += 1
        if role is Role.ATTACKER:
            self.attacker_turns += 1
        else:
            self.defender_turns += 1
        self.to_move = role.other
        self.winner = self.check_winner()
        return TurnOutcome(reward, self.observation(), self.done, self.winner, self.defender_turns)

    def check_winner(self) -> Role | None:
        st, sb = self.state, self.scores
        if st.compromised[st.server_at] or sb.attacker_score > sb.defender_score:
            return Role.ATTACKER
        if not st.compromised.any() or not self._frontier:
            return Role.DEFENDER
        # attacker moves first, so the defender's count closes the game
        cap_reached = self.defender_turns >= self.turn_cap_per_agent
        if cap_reached and sb.defender_score >= sb.attacker_score:
            return Role.DEFENDER
        return None


def new_game(cfg: TopologyConfig, turn_cap_per_agent: int) -> GameSession:
    return GameSession(cfg, turn_cap_per_agent)
