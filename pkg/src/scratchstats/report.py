"""Group-level aggregation: summaries, pairwise tests, and plot data.

Consumes the per-project tables (metrics, smell counts, topic
assignments, opcode counts) and produces the comparison artifacts: a
JSON report, a CSV of rank-sum results, and per-metric value files with
IQR outliers removed for plotting.
"""

from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass
from pathlib import Path

from .metrics import NUMERIC_METRIC_COLUMNS
from .smells import DETECTORS
from .stats import GroupComparison, filter_outliers_iqr, rank_sum_test

TOP_OPCODES_PER_GROUP = 10


class MissingUpstreamError(FileNotFoundError):
    """A required artifact from an earlier pipeline stage is absent."""


@dataclass(frozen=True)
class ProjectValues:
    """One project's numeric values keyed by metric name."""

    project_id: str
    group: str
    values: dict[str, float]


def _metric_names(projects: list[ProjectValues]) -> list[str]:
    """Column order: metrics table first, smell counts after, extras last."""
    seen: set[str] = set()
    for p in projects:
        seen.update(p.values.keys())
    ordered = [c for c in NUMERIC_METRIC_COLUMNS if c in seen]
    ordered += [f"smell_{d}" for d in DETECTORS if f"smell_{d}" in seen]
    ordered += sorted(seen - set(ordered))
    return ordered


def group_values(
    projects: list[ProjectValues], metric: str
) -> dict[str, list[float]]:
    by_group: dict[str, list[float]] = {}
    for p in projects:
        if metric in p.values:
            by_group.setdefault(p.group, []).append(p.values[metric])
    return by_group


def compare_groups(projects: list[ProjectValues]) -> list[GroupComparison]:
    """Rank-sum test for every metric over every pair of groups."""
    comparisons: list[GroupComparison] = []
    groups = sorted({p.group for p in projects})
    for metric in _metric_names(projects):
        values = group_values(projects, metric)
        for i, ga in enumerate(groups):
            for gb in groups[i + 1 :]:
                if not values.get(ga) or not values.get(gb):
                    continue
                comparisons.append(
                    rank_sum_test(
                        values[ga], values[gb],
                        metric=metric, group_a=ga, group_b=gb,
                    )
                )
    return comparisons


def topic_shares(
    assignments: list[tuple[str, str, int]], k: int
) -> dict[str, dict[str, float]]:
    """Share of each dominant topic within each group.

    assignments rows are (project_id, group, dominant_topic).
    """
    shares: dict[str, dict[str, float]] = {}
    by_group: dict[str, list[int]] = {}
    for _, group, topic in assignments:
        by_group.setdefault(group, []).append(topic)
    for group in sorted(by_group):
        topics = by_group[group]
        shares[group] = {
            str(t): round(topics.count(t) / len(topics), 6) for t in range(k)
        }
    return shares


def top_opcodes(
    opcode_rows: list[tuple[str, str, int]],
    group_of: dict[str, str],
    limit: int = TOP_OPCODES_PER_GROUP,
) -> dict[str, list[tuple[str, int]]]:
    """Most frequent opcodes per group; count ties break alphabetically.

    opcode_rows are (project_id, opcode, count).
    """
    totals: dict[str, dict[str, int]] = {}
    for project_id, opcode, count in opcode_rows:
        group = group_of.get(project_id, "unknown")
        bucket = totals.setdefault(group, {})
        bucket[opcode] = bucket.get(opcode, 0) + count
    result: dict[str, list[tuple[str, int]]] = {}
    for group in sorted(totals):
        ranked = sorted(totals[group].items(), key=lambda oc: (-oc[1], oc[0]))
        result[group] = ranked[:limit]
    return result


def build_report(
    projects: list[ProjectValues],
    comparisons: list[GroupComparison],
    shares: dict[str, dict[str, float]],
    opcode_tables: dict[str, list[tuple[str, int]]],
) -> dict:
    groups: dict[str, dict] = {}
    metric_names = _metric_names(projects)
    for group in sorted({p.group for p in projects}):
        members = [p for p in projects if p.group == group]
        summary: dict[str, dict[str, float]] = {}
        for metric in metric_names:
            values = [p.values[metric] for p in members if metric in p.values]
            if not values:
                continue
            summary[metric] = {
                "mean": round(statistics.fmean(values), 6),
                "median": round(statistics.median(values), 6),
            }
        groups[group] = {"n": len(members), "metrics": summary}
    return {
        "groups": groups,
        "comparisons": [
            {
                "metric": c.metric,
                "group_a": c.group_a,
                "group_b": c.group_b,
                "n_a": c.n_a,
                "n_b": c.n_b,
                "u": c.u_statistic,
                "p": round(c.p_value, 6),
                "method": c.method,
                **({"note": c.note} if c.note else {}),
            }
            for c in comparisons
        ],
        "topic_shares": shares,
        "top_opcodes": {
            group: [[opcode, count] for opcode, count in rows]
            for group, rows in opcode_tables.items()
        },
    }


def write_report_json(report: dict, path: Path) -> None:
    path.write_text(
        json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def write_comparisons_csv(comparisons: list[GroupComparison], path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["metric", "group_a", "group_b", "u", "p", "method"])
        for c in comparisons:
            writer.writerow(
                [c.metric, c.group_a, c.group_b, f"{c.u_statistic:g}",
                 f"{c.p_value:.6f}", c.method]
            )


# The Halstead counter columns differ only by letter case; spell their
# plot filenames out so the files coexist on case-insensitive systems.
_PLOT_FILENAMES = {
    "N1": "halstead_total_operators",
    "n1": "halstead_distinct_operators",
    "N2": "halstead_total_operands",
    "n2": "halstead_distinct_operands",
}


def plot_filename(metric: str) -> str:
    return f"{_PLOT_FILENAMES.get(metric, metric)}.csv"


def write_plotdata(projects: list[ProjectValues], directory: Path) -> None:
    """One CSV per metric: group,value rows with IQR outliers removed.

    Filtering happens within each group so one wide group cannot hide
    another group's outliers.
    """
    directory.mkdir(parents=True, exist_ok=True)
    for metric in _metric_names(projects):
        values = group_values(projects, metric)
        path = directory / plot_filename(metric)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["group", "value"])
            for group in sorted(values):
                for v in filter_outliers_iqr(values[group]):
                    writer.writerow([group, f"{v:g}"])
