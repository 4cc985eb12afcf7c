"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line; run with ``pytest -s`` to see them.
"""
import json
import time

import numpy as np
import pytest

from conftest import frontier_oracle
from sdn_duel import experiment
from sdn_duel.cli import _fixture, main
from sdn_duel.ddqn import AgentParams, DdqnAgent
from sdn_duel.dnd import DndStore, kernel
from sdn_duel.game import Role, action_count, new_game
from sdn_duel.memory import Transition
from sdn_duel.n2d import N2dAgent, blend
from sdn_duel.nn import DenseNet, backward_mse
from sdn_duel.stats import paired_ttest, unpaired_ttest


def verdict(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
    assert ok, f"{name}: {detail}"


def fixture_turns(game):
    return [float(r["defender_turns"]) for r in experiment.read_results(_fixture(f"table1_game{game}.csv"))]


def test_statistics_golden():
    start = time.perf_counter()
    g1, g2 = fixture_turns(1), fixture_turns(2)
    rep = paired_ttest(g1, g2)
    unp = unpaired_ttest(g1, g2)
    elapsed = time.perf_counter() - start
    checks = {
        "means": rep.mean_x == 4159.2 and rep.mean_y == 1823.8,
        "variances": abs(rep.var_x - 20064225.96) <= 0.01 and abs(rep.var_y - 3418095.95) <= 0.01,
        "pearson": abs(rep.pearson - 0.53) <= 0.005,
        "t": abs(rep.t_stat - 1.9255316) <= 1e-6,
        "p_two_tail": abs(rep.p_two_tail - 0.086288326) <= 1e-6,
        "t_crit_two_tail": abs(rep.t_critical_two_tail - 2.262157158218) <= 1e-9,
        "unpaired_p": abs(unp.p_two_tail - 0.1449) <= 5e-4,
        "runtime": elapsed < 1.0,
    }
    failed = [k for k, ok in checks.items() if not ok]
    detail = (f"t={rep.t_stat:.10f} p2={rep.p_two_tail:.10f} tcrit2={rep.t_critical_two_tail!r} "
              f"unpaired_p={unp.p_two_tail:.6f} {elapsed * 1e3:.1f}ms")
    if failed:
        detail += f" failed={failed}"
    verdict("statistics golden values", not failed, detail)


def test_dnd_oracle_suite():
    rng = np.random.default_rng(2024)
    worst_rel, worst_wsum, bound_ok = 0.0, 0.0, True
    for _ in range(100):
        size = int(rng.integers(1, 201))
        p = int(rng.integers(size, size + 20))
        store = DndStore(1, 32, capacity=1000, neighbors=p)
        keys = rng.normal(size=(size, 32))
        values = rng.normal(size=size) * rng.uniform(0.1, 50)
        for k, v in zip(keys, values):
            store.write(0, k, float(v))
        for _ in range(3):
            h = keys[rng.integers(size)] + rng.normal(size=32) * rng.choice([0.0, 0.01, 1.0])
            k = np.array([kernel(h, ki, store.delta) for ki in keys])
            exact = float(np.dot(k / k.sum(), values))
            q = store.peek(0, h)
            worst_rel = max(worst_rel, abs(q - exact) / max(abs(exact), 1e-300))
            _, w = store.weights(0, h)
            worst_wsum = max(worst_wsum, abs(w.sum() - 1.0))
            bound_ok &= bool(values.min() - 1e-12 <= q <= values.max() + 1e-12) and bool((w >= 0).all())
    ok = worst_rel <= 1e-12 and worst_wsum <= 1e-9 and bound_ok
    verdict("DND oracle suite", ok,
            f"max rel err={worst_rel:.2e} max |sum w - 1|={worst_wsum:.2e} convex bound ok={bound_ok}")


def numeric_grads(net, x, target, action, eps=1e-6):
    def loss():
        return (target - net.forward(x)[action]) ** 2

    grads = []
    for p in net.parameters():
        g = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + eps
            up = loss()
            p[idx] = old - eps
            down = loss()
            p[idx] = old
            g[idx] = (up - down) / (2 * eps)
        grads.append(g)
    return grads


def test_gradient_check():
    rng = np.random.default_rng(77)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        depth = int(rng.integers(1, 4))
        widths = [int(w) for w in rng.integers(1, 9, size=depth + 1)]
        net = DenseNet.build(widths, rng)
        for layer in net.layers:
            layer.b[:] = rng.normal(scale=0.5, size=layer.b.shape)
        x = rng.normal(size=widths[0])
        target = float(rng.normal() * 3)
        action = int(rng.integers(widths[-1]))
        analytic = np.concatenate([g.ravel() for pair in backward_mse(net, x, target, action) for g in pair])
        numeric = np.concatenate([g.ravel() for g in numeric_grads(net, x, target, action)])
        rel = np.abs(analytic - numeric) / np.maximum(1e-8, np.abs(analytic) + np.abs(numeric))
        worst = max(worst, float(rel.max()))
    elapsed = time.perf_counter() - start
    verdict("gradient check", worst < 1e-4 and elapsed < 30, f"max rel err={worst:.2e} {elapsed:.2f}s")


def test_game_engine_property_suite(cfg):
    rng = np.random.default_rng(10_000)
    start = time.perf_counter()
    problems = []
    n_games = 10_000
    for game in range(n_games):
        g = new_game(cfg, 25_000)
        while not g.done:
            role = g.to_move
            legal = sorted(g.legal_actions(role))
            if role is Role.ATTACKER:
                oracle = frontier_oracle(cfg, g.state.compromised, g.state.link_active)
                if set(legal) != oracle:
                    problems.append(f"game {game} turn {g.turn}: frontier mismatch")
            a = int(legal[rng.integers(len(legal))])
            if not (0 <= a < action_count(role, cfg.host_count)):
                problems.append(f"game {game}: illegal index {a}")
            out = g.step(role, a)
            if g.scores.defender_score + g.scores.attacker_score != cfg.s_max:
                problems.append(f"game {game} turn {g.turn}: scores not zero-sum")
            if len(out.next_observation) != 80:
                problems.append(f"game {game}: observation length {len(out.next_observation)}")
            if out.reward not in ({-1, 1} if role is Role.ATTACKER else {-1, 0, 1}):
                problems.append(f"game {game}: reward {out.reward} for {role.value}")
        if problems:
            break
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 120
    verdict("game-engine property suite", ok,
            f"{n_games} games {elapsed:.1f}s" + (f" first problem: {problems[0]}" if problems else ""))


def test_ddqn_identity():
    rng = np.random.default_rng(5)
    agent = DdqnAgent(80, 68, rng, AgentParams(), budget_steps=1000)
    agent.target = agent.online.copy()
    mismatches = 0
    for _ in range(1000):
        done = bool(rng.random() < 0.1)
        t = Transition(rng.integers(0, 2, 80), int(rng.integers(68)), int(rng.choice([-1, 0, 1])),
                       rng.integers(0, 2, 80), done)
        expected = t.r if done else t.r + agent.gamma * agent.online.forward(t.s_next).max()
        mismatches += agent.double_q_target(t) != expected
    verdict("DDQN identity", mismatches == 0, f"{mismatches}/1000 mismatches")


def test_n2d_mixing():
    hand = all(blend(2.0, 4.0, lam) == want for lam, want in ((1.0, 2.0), (0.0, 4.0), (0.5, 3.0)))
    rng = np.random.default_rng(6)
    agent = N2dAgent(80, 68, rng, AgentParams(), budget_steps=100, change_step=10)
    for a in range(68):
        for _ in range(3):
            agent.dnd.write(a, rng.normal(size=32), float(rng.normal() * 10))
    exact_after = True
    for S in (10, 11, 500):
        agent.S = S
        for _ in range(20):
            obs = rng.integers(0, 2, 80)
            q = agent.q_dqn(obs)
            exact_after &= all(agent.q_n2d(obs, a) == q[a] for a in range(68))
    agent.S = 5
    obs = rng.integers(0, 2, 80)
    mid = all(agent.q_n2d(obs, a) == blend(agent.dnd.peek(a, agent.embedding(obs)), agent.q_dqn(obs)[a], 0.5)
              for a in range(68))
    ok = hand and exact_after and mid
    verdict("N2D mixing", ok, f"hand cases={hand} exact DQN after CS={exact_after} lambda=0.5 blend={mid}")


@pytest.fixture(scope="module")
def quick_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("quick")
    start = time.perf_counter()
    codes = {g: main(["simulate", "--quick", "--game", str(g), "--seed", "0", "--out", str(root / f"game{g}")])
             for g in (1, 2)}
    return root, codes, time.perf_counter() - start


def test_end_to_end_smoke(quick_runs):
    root, codes, elapsed = quick_runs
    problems, wins = [], {}
    for g in (1, 2):
        out = root / f"game{g}"
        if codes[g] != 0:
            problems.append(f"game {g} exit {codes[g]}")
            continue
        records = experiment.read_records(out / "results.csv")
        if len(records) != 10:
            problems.append(f"game {g}: {len(records)} records")
        for rec in records:
            by_win = rec.winner in ("attacker", "defender")
            if not by_win or rec.defender_turns > 2000:
                problems.append(f"game {g} run {rec.run}: winner={rec.winner} turns={rec.defender_turns}")
            events = [json.loads(line) for line in
                      (out / "turns" / f"run_{rec.run:03d}.jsonl").read_text().splitlines()]
            if any(set(ev) != set(experiment.TURN_FIELDS) for ev in events) or not events[-1]["done"]:
                problems.append(f"game {g} run {rec.run}: bad turn log")
        wins[g] = json.loads((out / "summary.json").read_text())["defender_wins"]
    ok = not problems and elapsed < 15 * 60
    verdict("end-to-end smoke", ok,
            f"{elapsed:.1f}s defender wins: game1={wins.get(1)}/10 game2={wins.get(2)}/10"
            + (f" problems={problems[:3]}" if problems else ""))


def test_determinism(quick_runs, tmp_path):
    root, _, _ = quick_runs
    main(["simulate", "--quick", "--game", "1", "--seed", "0", "--out", str(tmp_path / "game1")])
    a, b = root / "game1", tmp_path / "game1"
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    differing = [str(rel) for rel in files if (a / rel).read_bytes() != (b / rel).read_bytes()]
    for name in ("s1", "s2"):
        main(["stats", "--out", str(tmp_path / name)])
        main(["plot", "--in", str(a / "results.csv"), "--out", str(tmp_path / name / "plot.svg")])
    for rel in ("ttest_report.txt", "ttest_report.csv", "plot.svg", "plot.csv"):
        if (tmp_path / "s1" / rel).read_bytes() != (tmp_path / "s2" / rel).read_bytes():
            differing.append(rel)
    verdict("determinism", bool(files) and not differing,
            f"{len(files) + 4} artifacts compared" + (f" differing={differing}" if differing else ""))
