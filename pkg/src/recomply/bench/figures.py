"""Downstream figure rendering from tabular reports.

The harness itself emits only delimited data; these helpers turn an emitted
report into PNG figures (cost per policy by network size, re-test ratios).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .report import ExperimentReport


def render_figures(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    comparison = _cost_by_policy_and_size(report)
    if comparison:
        written.append(_plot_costs(comparison, report.name, out))
    ratios = report.ratios()
    if ratios:
        written.append(_plot_ratios(ratios, report.name, out))
    return written


def _cost_by_policy_and_size(report: ExperimentReport) -> dict:
    data: dict[str, dict[int, list[float]]] = {}
    for row in report.sorted_rows():
        if row.phase not in ("retest", "single"):
            continue
        data.setdefault(row.policy, {}).setdefault(row.size, []).append(row.total_cost)
    return {
        policy: {size: sum(v) / len(v) for size, v in sizes.items()}
        for policy, sizes in data.items()
    }


def _plot_costs(data: dict, name: str, out: Path) -> Path:
    sizes = sorted({s for sizes in data.values() for s in sizes})
    policies = sorted(data)
    width = 0.8 / max(len(policies), 1)
    fig, ax = plt.subplots(figsize=(9, 5))
    for k, policy in enumerate(policies):
        xs = [i + k * width for i in range(len(sizes))]
        ys = [data[policy].get(size, 0.0) for size in sizes]
        ax.bar(xs, ys, width=width, label=policy)
    ax.set_yscale("log")
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(sizes))])
    ax.set_xticklabels([str(s) for s in sizes])
    ax.set_xlabel("network size (machines)")
    ax.set_ylabel("session cost (time units, log scale)")
    ax.set_title(f"{name}: session cost per policy")
    ax.legend()
    fig.tight_layout()
    path = out / f"{name}-costs.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _plot_ratios(ratios, name: str, out: Path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    labels = [f"{r.size}/{r.seed}" for r in ratios]
    values = [r.ratio for r in ratios]
    ax.bar(range(len(values)), values, color="#3b7dd8")
    ax.axhline(1.0, color="grey", linewidth=0.8, linestyle="--")
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("re-test cost / first-run cost")
    ax.set_title(f"{name}: re-test efficiency")
    fig.tight_layout()
    path = out / f"{name}-ratios.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
