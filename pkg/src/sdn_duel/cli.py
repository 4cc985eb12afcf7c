"""Command-line entry point: ``sdn-duel {simulate,stats,plot,topo}``.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path

from . import experiment, report, stats
from .topology import ConfigError, default_config, load_config_file

OUT_ENV = "SDN_DUEL_OUT"
QUICK_RUNS, QUICK_TURNS = 10, 2000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fixture(name: str) -> str:
    return str(resources.files("sdn_duel.data").joinpath(name))


def _load_cfg(path):
    if path is None:
        return default_config()
    if not Path(path).is_file():
        raise UsageError(f"config file not found: {path}")
    return load_config_file(path)


def _default_out(sub: str) -> str:
    return os.environ.get(OUT_ENV, str(Path("sdn_duel_out") / sub))


def cmd_simulate(args) -> int:
    runs, turns = args.runs, args.turns_per_agent
    if args.quick:
        runs, turns = QUICK_RUNS, QUICK_TURNS
    if runs < 1 or turns < 1:
        raise UsageError("--runs and --turns-per-agent must be >= 1")
    cfg = _load_cfg(args.config)
    out = Path(args.out or _default_out(f"game{args.game}"))
    records = experiment.run_series(cfg, args.game, runs, turns, args.seed, out_dir=out)
    wins = sum(r.winner == "defender" for r in records)
    summary = {"game": args.game, "runs": runs, "turns_per_agent": turns, "seed": args.seed,
               "defender_wins": wins, "defender_win_rate": wins / runs}
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"game {args.game}: defender won {wins}/{runs} runs; results in {out / 'results.csv'}")
    return 0


def cmd_stats(args) -> int:
    xs = [float(r["defender_turns"]) for r in experiment.read_results(args.game1)]
    ys = [float(r["defender_turns"]) for r in experiment.read_results(args.game2)]
    rep = stats.ttest(xs, ys, alpha=args.alpha, mode=args.mode)
    txt, _ = report.write_ttest_report(rep, args.out or _default_out("stats"))
    sys.stdout.write(Path(txt).read_text())
    return 0


def _plot_rows(src: Path) -> list[tuple[int, int, int]]:
    if src.is_dir():
        logs = sorted(src.glob("*.jsonl"))
        return [(i, *experiment.reward_sums_from_log(p)) for i, p in enumerate(logs, 1)]
    if src.suffix == ".jsonl":
        if src.stat().st_size == 0:
            return []
        return [(1, *experiment.reward_sums_from_log(src))]
    rows = experiment.read_results(src, required=("run", "defender_reward_sum", "attacker_reward_sum"))
    return [(int(r["run"]), int(r["defender_reward_sum"]), int(r["attacker_reward_sum"])) for r in rows]


def cmd_plot(args) -> int:
    src = Path(args.inp)
    if not src.exists():
        raise FileNotFoundError(f"input not found: {src}")
    rows = _plot_rows(src)
    if not rows:
        raise ValueError(f"no runs found in {src}")
    svg, csv_path = report.emit_reward_plot(rows, args.out, title=args.title)
    print(f"wrote {svg} and {csv_path}")
    return 0


def cmd_topo_validate(args) -> int:
    cfg = _load_cfg(args.config)
    print(f"hosts={cfg.host_count} links={cfg.link_count} observation_width={cfg.observation_width}")
    print(f"critical_server={cfg.critical_server} backups={list(cfg.backup_hosts)} "
          f"initially_compromised={sorted(cfg.initially_compromised)} s_max={cfg.s_max}")
    print("slot  meaning")
    for slot, desc in cfg.slot_layout():
        print(f"{slot:>4}  {desc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = _Parser(prog="sdn-duel", description="Attacker/defender RL game on a simulated SDN.")
    p.add_argument("-v", "--verbose", action="store_true", help="log per-run progress")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", formatter_class=fmt,
                         help="play a series of games and write results, turn logs and checkpoints")
    sim.add_argument("--game", type=int, choices=(1, 2), default=1,
                     help="1: N2D defends vs DDQN attacker; 2: roles swapped")
    sim.add_argument("--runs", type=int, default=10, help="games in the series (agents keep memory)")
    sim.add_argument("--turns-per-agent", type=int, default=25_000, help="turn cap per agent per game")
    sim.add_argument("--quick", action="store_true",
                     help=f"preset: --runs {QUICK_RUNS} --turns-per-agent {QUICK_TURNS}")
    sim.add_argument("--config", default=None, help="topology JSON (default: bundled 32-host topology)")
    sim.add_argument("--seed", type=int, default=0, help="seed for agent initialisation and exploration")
    sim.add_argument("--out", default=None, help=f"output directory (default: ${OUT_ENV} or sdn_duel_out/gameN)")
    sim.set_defaults(func=cmd_simulate)

    st = sub.add_parser("stats", formatter_class=fmt, help="t-test on defender turn counts of two series")
    st.add_argument("--game1", default=_fixture("table1_game1.csv"), help="results CSV for game 1")
    st.add_argument("--game2", default=_fixture("table1_game2.csv"), help="results CSV for game 2")
    st.add_argument("--alpha", type=float, default=0.05, help="significance level")
    st.add_argument("--mode", choices=("paired", "unpaired"), default="paired",
                    help="paired t-test or pooled-variance two-sample test")
    st.add_argument("--seed", type=int, default=0, help="accepted for uniformity; stats are deterministic")
    st.add_argument("--out", default=None, help=f"report directory (default: ${OUT_ENV} or sdn_duel_out/stats)")
    st.set_defaults(func=cmd_stats)

    pl = sub.add_parser("plot", formatter_class=fmt, help="per-run reward bars from results CSV or turn logs")
    pl.add_argument("--in", dest="inp", required=True,
                    help="results.csv, a single JSONL turn log, or a directory of JSONL logs")
    pl.add_argument("--out", default="reward_plot.svg", help="SVG path; a CSV twin is written alongside")
    pl.add_argument("--title", default="", help="plot title")
    pl.set_defaults(func=cmd_plot)

    topo = sub.add_parser("topo", help="topology utilities")
    tsub = topo.add_subparsers(dest="topo_command", required=True, parser_class=_Parser)
    tv = tsub.add_parser("validate", formatter_class=fmt, help="validate a config and print the slot layout")
    tv.add_argument("--config", default=None, help="topology JSON (default: bundled 32-host topology)")
    tv.set_defaults(func=cmd_topo_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sdn-duel: error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError, OSError, stats.StatsError) as exc:
        print(f"sdn-duel: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
