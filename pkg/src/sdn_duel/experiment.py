"""Game series orchestration, result files and reward plots."""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from . import checkpoint
from .ddqn import AgentParams, DdqnAgent
from .game import Role, action_count, new_game
from .n2d import N2dAgent
from .topology import TopologyConfig

log = logging.getLogger(__name__)

RESULT_COLUMNS = ("run", "game", "winner", "defender_turns", "defender_score", "attacker_score",
                  "defender_reward_sum", "attacker_reward_sum", "seed")
TURN_FIELDS = ("turn", "role", "action_index", "reward", "defender_score", "attacker_score",
               "done", "winner")
AGENT_KINDS = {"ddqn": DdqnAgent, "n2d": N2dAgent}


@dataclass(frozen=True)
class RunRecord:
    run: int
    game: int
    winner: str
    defender_turns: int
    defender_score: int
    attacker_score: int
    defender_reward_sum: int
    attacker_reward_sum: int
    seed: int


def roles_for_game(game_id: int) -> dict[Role, str]:
    """Game 1: N2D defends against a DDQN attacker. Game 2 swaps the roles."""
    if game_id == 1:
        return {Role.DEFENDER: "n2d", Role.ATTACKER: "ddqn"}
    if game_id == 2:
        return {Role.DEFENDER: "ddqn", Role.ATTACKER: "n2d"}
    raise ValueError(f"game id must be 1 or 2, got {game_id}")


def make_agents(cfg: TopologyConfig, kinds: dict[Role, str], budget_steps: int, seed: int,
                params: AgentParams | None = None) -> dict:
    seeds = np.random.SeedSequence(seed).spawn(2)
    agents = {}
    for role, ss in zip((Role.ATTACKER, Role.DEFENDER), seeds):
        cls = AGENT_KINDS[kinds[role]]
        agents[role] = cls(cfg.observation_width, action_count(role, cfg.host_count),
                           np.random.default_rng(ss), params=params, budget_steps=budget_steps)
    return agents


def play_game(cfg: TopologyConfig, agents: dict, turn_cap_per_agent: int, turn_log=None):
    """Play one game to completion. Returns (session, reward sums per role)."""
    session = new_game(cfg, turn_cap_per_agent)
    rewards = {Role.ATTACKER: 0, Role.DEFENDER: 0}
    while not session.done:
        role = session.to_move
        obs = session.observation()
        mask = session.legal_mask(role)
        a, outcome = agents[role].act(obs, mask, lambda idx, r=role: session.step(r, idx))
        rewards[role] += outcome.reward
        if turn_log is not None:
            turn_log.write(json.dumps({
                "turn": session.turn,
                "role": role.value,
                "action_index": a,
                "reward": outcome.reward,
                "defender_score": session.scores.defender_score,
                "attacker_score": session.scores.attacker_score,
                "done": outcome.done,
                "winner": outcome.winner.value if outcome.winner else None,
            }) + "\n")
    for agent in agents.values():
        agent.finish_episode()
    return session, rewards


def run_series(cfg: TopologyConfig, game_id: int, runs: int, turns_per_agent: int, seed: int,
               out_dir: str | Path | None = None, params: AgentParams | None = None) -> list[RunRecord]:
    """Play ``runs`` games with the same two agents, which keep learning across runs."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    kinds = roles_for_game(game_id)
    agents = make_agents(cfg, kinds, runs * turns_per_agent, seed, params)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        (out / "turns").mkdir(parents=True, exist_ok=True)

    records = []
    for run in range(1, runs + 1):
        if out is not None:
            with open(out / "turns" / f"run_{run:03d}.jsonl", "w") as fh:
                session, rewards = play_game(cfg, agents, turns_per_agent, fh)
        else:
            session, rewards = play_game(cfg, agents, turns_per_agent)
        rec = RunRecord(
            run=run, game=game_id, winner=session.winner.value,
            defender_turns=session.defender_turns,
            defender_score=session.scores.defender_score,
            attacker_score=session.scores.attacker_score,
            defender_reward_sum=rewards[Role.DEFENDER],
            attacker_reward_sum=rewards[Role.ATTACKER],
            seed=seed,
        )
        log.info("game %d run %d: %s wins after %d defender turns", game_id, run, rec.winner, rec.defender_turns)
        records.append(rec)

    if out is not None:
        write_results(out / "results.csv", records)
        ckpt = out / "checkpoints"
        ckpt.mkdir(exist_ok=True)
        for role, agent in agents.items():
            checkpoint.save_agent(ckpt / f"{role.value}_{agent.kind}.npz", agent)
    return records


def write_results(path: str | Path, records: list[RunRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for rec in records:
            w.writerow(astuple(rec))


def read_results(path: str | Path, required=("defender_turns",)) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: missing column(s) {', '.join(missing)}")
        return list(reader)


def read_records(path: str | Path) -> list[RunRecord]:
    rows = read_results(path, required=RESULT_COLUMNS)
    types = {f.name: f.type for f in fields(RunRecord)}
    return [RunRecord(**{k: (row[k] if types[k] == "str" else int(row[k])) for k in RESULT_COLUMNS})
            for row in rows]


def reward_sums_from_log(path: str | Path) -> tuple[int, int]:
    """(defender, attacker) reward totals re-aggregated from a JSONL turn log."""
    sums = {"defender": 0, "attacker": 0}
    with open(path) as fh:
        for line in fh:
            if line.strip():
                ev = json.loads(line)
                sums[ev["role"]] += ev["reward"]
    return sums["defender"], sums["attacker"]
