"""Per-project code metrics.

Block counting includes every block: hats, statement stacks, substack
contents, orphan stacks, and reporter blocks nested inside inputs.
Halstead treats each block opcode occurrence as an operator and each
literal, dropdown selection or referenced name as an operand; operand
identity is the exact string form of the value.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .controlflow import (
    build_script_cfg,
    cyclomatic_complexity,
    interprocedural_complexity,
)
from .model import (
    BlockRef,
    CATEGORIES,
    Literal,
    MenuSelection,
    Project,
    block_category,
    iter_project_blocks,
)

# Programming concepts counted over canonical opcodes.
CONCEPT_TABLE: dict[str, frozenset[str]] = {
    "conditional": frozenset({"control_if", "motion_ifonedgebounce", "control_if_else"}),
    "coordination": frozenset(
        {
            "event_broadcast",
            "event_whenbroadcastreceived",
            "event_broadcastandwait",
            "control_wait",
            "control_wait_until",
        }
    ),
    "iteration": frozenset({"control_repeat", "control_repeat_until", "control_forever"}),
    "variables": frozenset(
        {
            "data_changevariableby",
            "data_setvariableto",
            "data_variable",
            "data_showvariable",
            "data_hidevariable",
        }
    ),
}

CONCEPTS = ("conditional", "coordination", "iteration", "variables")


def count_blocks(project: Project) -> int:
    return sum(1 for _ in iter_project_blocks(project))


def distinct_opcodes(project: Project) -> int:
    return len({b.opcode for b in iter_project_blocks(project)})


def category_histogram(project: Project) -> dict[str, int]:
    counts = {c: 0 for c in CATEGORIES}
    for block in iter_project_blocks(project):
        counts[block_category(block.opcode)] += 1
    return counts


def classify_concepts(project: Project) -> dict[str, int]:
    counts = {c: 0 for c in CONCEPTS}
    for block in iter_project_blocks(project):
        for concept, opcodes in CONCEPT_TABLE.items():
            if block.opcode in opcodes:
                counts[concept] += 1
    return counts


def rank_opcodes(projects, top: int | None = None) -> list[tuple[str, str, int]]:
    """(category, opcode, count) over one or more projects, most frequent first.

    Ties are broken lexicographically by opcode so the ranking is
    reproducible.
    """
    if isinstance(projects, Project):
        projects = [projects]
    counts: dict[str, int] = {}
    for project in projects:
        for block in iter_project_blocks(project):
            counts[block.opcode] = counts.get(block.opcode, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    out = [(block_category(op), op, n) for op, n in ranked]
    return out[:top] if top is not None else out


@dataclass(frozen=True)
class HalsteadMetrics:
    N1: int  # total operator occurrences
    N2: int  # total operand occurrences
    n1: int  # distinct operators
    n2: int  # distinct operands

    @property
    def length(self) -> int:
        return self.N1 + self.N2

    @property
    def vocabulary(self) -> int:
        return self.n1 + self.n2

    @property
    def volume(self) -> float:
        n = self.vocabulary
        if n <= 1:
            return 0.0
        return (self.N1 + self.N2) * math.log2(n)

    @property
    def difficulty(self) -> float:
        return (self.n1 / 2.0) * (self.N2 / max(self.n2, 1))

    @property
    def effort(self) -> float:
        return self.difficulty * self.volume


def halstead(project: Project) -> HalsteadMetrics:
    operators: dict[str, int] = {}
    operands: dict[str, int] = {}
    for block in iter_project_blocks(project):
        operators[block.opcode] = operators.get(block.opcode, 0) + 1
        for inp in block.inputs:
            if isinstance(inp, (Literal, MenuSelection)):
                key = str(inp.value)
                operands[key] = operands.get(key, 0) + 1
            elif isinstance(inp, BlockRef):
                pass  # nested blocks are already visited by the walk
    return HalsteadMetrics(
        N1=sum(operators.values()),
        N2=sum(operands.values()),
        n1=len(operators),
        n2=len(operands),
    )


def wmc(project: Project) -> int:
    """Sum of script cyclomatic complexities; orphan stacks do not count."""
    total = 0
    for sprite in project.targets():
        for script in sprite.scripts:
            total += cyclomatic_complexity(build_script_cfg(script))
    return total


def icc(project: Project) -> int:
    return interprocedural_complexity(project)


@dataclass(frozen=True)
class MetricRecord:
    project_id: str
    group: str
    age: int | None
    block_count: int
    distinct_opcodes: int
    categories: dict[str, int]
    concepts: dict[str, int]
    halstead: HalsteadMetrics
    wmc: int
    icc: int


def compute_metric_record(
    project: Project, group: str = "unknown", age: int | None = None
) -> MetricRecord:
    return MetricRecord(
        project_id=project.project_id,
        group=group,
        age=age,
        block_count=count_blocks(project),
        distinct_opcodes=distinct_opcodes(project),
        categories=category_histogram(project),
        concepts=classify_concepts(project),
        halstead=halstead(project),
        wmc=wmc(project),
        icc=icc(project),
    )


METRICS_COLUMNS = (
    ("project_id", "group", "age", "block_count", "distinct_opcodes")
    + CATEGORIES
    + CONCEPTS
    + (
        "N1",
        "N2",
        "n1",
        "n2",
        "halstead_length",
        "halstead_vocabulary",
        "halstead_volume",
        "halstead_difficulty",
        "halstead_effort",
        "wmc",
        "icc",
    )
)

# Numeric column names usable in group comparisons (everything but ids).
NUMERIC_METRIC_COLUMNS = tuple(
    c for c in METRICS_COLUMNS if c not in ("project_id", "group", "age")
)


def record_to_row(record: MetricRecord) -> dict[str, object]:
    h = record.halstead
    row: dict[str, object] = {
        "project_id": record.project_id,
        "group": record.group,
        "age": "" if record.age is None else record.age,
        "block_count": record.block_count,
        "distinct_opcodes": record.distinct_opcodes,
    }
    for cat in CATEGORIES:
        row[cat] = record.categories[cat]
    for concept in CONCEPTS:
        row[concept] = record.concepts[concept]
    row.update(
        {
            "N1": h.N1,
            "N2": h.N2,
            "n1": h.n1,
            "n2": h.n2,
            "halstead_length": h.length,
            "halstead_vocabulary": h.vocabulary,
            "halstead_volume": f"{h.volume:.3f}",
            "halstead_difficulty": f"{h.difficulty:.3f}",
            "halstead_effort": f"{h.effort:.3f}",
            "wmc": record.wmc,
            "icc": record.icc,
        }
    )
    return row


def write_metrics_csv(records: list[MetricRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(METRICS_COLUMNS))
        writer.writeheader()
        for record in records:
            writer.writerow(record_to_row(record))
