"""Experiment reports: deterministic tabular output in CSV or JSON-lines.

Row and field order are fixed so identical experiments produce byte-identical
files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path


class IOFailure(OSError):
    """Report destination could not be written."""


ROW_FIELDS = [
    "experiment", "seed", "size", "profile", "policy", "phase", "repetition",
    "mode", "total_cost", "coverage", "vectors_extracted", "compromised", "ratio",
]


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    seed: int
    size: int
    profile: str
    policy: str
    phase: str  # first | retest | single
    repetition: int
    mode: str
    total_cost: float
    coverage: float
    vectors_extracted: int
    compromised: int
    ratio: float | None = None

    def sort_key(self):
        return (self.size, self.seed, self.profile, self.policy, self.phase, self.repetition)

    def to_dict(self) -> dict:
        out = {name: getattr(self, name) for name in ROW_FIELDS}
        return out


@dataclass
class ExperimentReport:
    name: str
    rows: list[ReportRow] = field(default_factory=list)

    def sorted_rows(self) -> list[ReportRow]:
        return sorted(self.rows, key=ReportRow.sort_key)

    def aggregate(self) -> dict:
        """Per-policy mean and standard deviation of cost and coverage."""
        groups: dict[str, list[ReportRow]] = {}
        for row in self.rows:
            groups.setdefault(row.policy, []).append(row)
        out = {}
        for policy in sorted(groups):
            rows = groups[policy]
            costs = [r.total_cost for r in rows]
            covs = [r.coverage for r in rows]
            out[policy] = {
                "rows": len(rows),
                "cost_mean": _mean(costs),
                "cost_std": _std(costs),
                "coverage_mean": _mean(covs),
                "coverage_std": _std(covs),
            }
        return out

    def ratios(self) -> list[ReportRow]:
        return [r for r in self.sorted_rows() if r.ratio is not None]

    def band_costs(self, phase_filter=("retest", "single")) -> dict:
        """Mean cost per (profile, policy): the per-band ranking view."""
        groups: dict[tuple[str, str], list[float]] = {}
        for row in self.rows:
            if row.phase in phase_filter:
                groups.setdefault((row.profile, row.policy), []).append(row.total_cost)
        return {key: _mean(vals) for key, vals in sorted(groups.items())}


def _mean(xs) -> float:
    return sum(xs) / len(xs) if xs else 0.0


def _std(xs) -> float:
    if len(xs) < 2:
        return 0.0
    mu = _mean(xs)
    return math.sqrt(sum((x - mu) ** 2 for x in xs) / (len(xs) - 1))


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: ExperimentReport, fmt: str, out_dir: str | Path) -> Path:
    """Write rows plus aggregate and ratio side-tables; returns the rows file."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            main = out / f"{report.name}.csv"
            with main.open("w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(ROW_FIELDS)
                for row in report.sorted_rows():
                    writer.writerow(_format_cell(getattr(row, f)) for f in ROW_FIELDS)
            _emit_aggregate_csv(report, out)
        elif fmt == "jsonl":
            main = out / f"{report.name}.jsonl"
            lines = [
                json.dumps(r.to_dict(), sort_keys=True, separators=(",", ":"))
                for r in report.sorted_rows()
            ]
            main.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
            agg = out / f"{report.name}-aggregate.jsonl"
            agg_lines = [
                json.dumps({"policy": p, **stats}, sort_keys=True, separators=(",", ":"))
                for p, stats in report.aggregate().items()
            ]
            agg.write_text("\n".join(agg_lines) + ("\n" if agg_lines else ""), encoding="utf-8")
        else:
            raise ValueError(f"unknown report format {fmt!r}")
    except OSError as exc:
        raise IOFailure(f"cannot write report under {out}: {exc}") from exc
    return main


def _emit_aggregate_csv(report: ExperimentReport, out: Path) -> None:
    agg = out / f"{report.name}-aggregate.csv"
    with agg.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["policy", "rows", "cost_mean", "cost_std", "coverage_mean", "coverage_std"])
        for policy, stats in report.aggregate().items():
            writer.writerow([
                policy, stats["rows"], repr(stats["cost_mean"]), repr(stats["cost_std"]),
                repr(stats["coverage_mean"]), repr(stats["coverage_std"]),
            ])
    ratios = report.ratios()
    if ratios:
        path = out / f"{report.name}-ratios.csv"
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["seed", "size", "profile", "repetition", "ratio"])
            for row in ratios:
                writer.writerow([row.seed, row.size, row.profile, row.repetition, repr(row.ratio)])
