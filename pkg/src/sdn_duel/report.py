"""Plain-text/CSV t-test reports and per-run reward bar charts."""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402

from .stats import TTestReport  # noqa: E402


def write_ttest_report(report: TTestReport, out_dir: str | Path, labels=("Game 1 turns", "Game 2 turns")):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = report.rows()
    width = max(len(r[0]) for r in rows)
    lines = [f"{report.mode.capitalize()} two-tailed t-test (alpha = {report.alpha})",
             f"{'':<{width}}  {labels[0]:<24}  {labels[1]}"]
    lines += [f"{name:<{width}}  {a:<24}  {b}".rstrip() for name, a, b in rows]
    verdict = "significant" if report.significant else "not significant"
    lines.append(f"Difference is {verdict} at alpha = {report.alpha}.")
    (out / "ttest_report.txt").write_text("\n".join(lines) + "\n")
    with open(out / "ttest_report.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("statistic", labels[0], labels[1]))
        w.writerows(rows)
    return out / "ttest_report.txt", out / "ttest_report.csv"


def emit_reward_plot(rows: list[tuple[int, int, int]], out_path: str | Path, title: str = ""):
    """Paired bars of (run, defender_reward_sum, attacker_reward_sum).

    Writes an SVG at ``out_path`` and a CSV with the plotted values next to it.
    """
    if not rows:
        raise ValueError("nothing to plot")
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    runs = [r[0] for r in rows]
    defender = [r[1] for r in rows]
    attacker = [r[2] for r in rows]

    with plt.rc_context({"svg.hashsalt": "sdn-duel", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(8, 4))
        xs = range(len(runs))
        ax.bar([x - 0.2 for x in xs], defender, width=0.4, label="defender", color="tab:blue")
        ax.bar([x + 0.2 for x in xs], attacker, width=0.4, label="attacker", color="tab:red")
        ax.set_xticks(list(xs), [str(r) for r in runs])
        ax.set_xlabel("run")
        ax.set_ylabel("cumulative reward")
        ax.axhline(0, color="black", linewidth=0.5)
        if title:
            ax.set_title(title)
        ax.legend()
        fig.tight_layout()
        fig.savefig(out_path, format="svg", metadata={"Date": None})
        plt.close(fig)

    csv_path = out_path.with_suffix(".csv")
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("run", "defender_reward_sum", "attacker_reward_sum"))
        w.writerows(rows)
    return out_path, csv_path
