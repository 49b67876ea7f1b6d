"""Pattern detectors for common beginner mistakes and code duplication.

Every detector is a pure function from a project to findings; running
them repeatedly gives identical results.  Clone pairs are reported once,
under the strictest type that matches: identical opcode and operand
sequences (Type 1), identical opcodes with differing operands (Type 2),
or opcode sequences equal after deleting a bounded number of blocks from
either script (Type 3).
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

from .model import (
    Block,
    BlockRef,
    Literal,
    MenuSelection,
    Project,
    Script,
    Sprite,
    iter_block_tree,
    iter_script_blocks,
    iter_sprite_blocks,
    script_block_count,
)

DETECTORS = (
    "DuplicateSprite",
    "EmptySprite",
    "MissingInitialization",
    "SpriteNaming",
    "StutteringMovement",
    "CloneType1",
    "CloneType2",
    "CloneType3",
    "DeadCode",
    "EmptyScript",
    "LongScript",
    "MissingPenUpEraseAll",
)


@dataclass(frozen=True)
class SmellConfig:
    long_script_threshold: int = 12
    clone_min_length: int = 6
    clone_type3_max_gap: int = 2


@dataclass(frozen=True)
class Location:
    sprite: str
    script_index: int | None = None
    block_index: int | None = None


@dataclass(frozen=True)
class SmellFinding:
    detector: str
    project_id: str
    location: Location
    message: str


# ---------------------------------------------------------------------------
# Script signatures shared by the duplicate and clone detectors


def _block_signature(block: Block) -> tuple[str, tuple[str, ...]]:
    operands = tuple(
        str(inp.value)
        for inp in block.inputs
        if isinstance(inp, (Literal, MenuSelection))
    )
    return (block.opcode, operands)


def script_signature(script: Script) -> tuple[tuple[str, tuple[str, ...]], ...]:
    """Flattened (opcode, operands) sequence in canonical traversal order."""
    return tuple(_block_signature(b) for b in iter_script_blocks(script))


def _opcode_sequence(script: Script) -> tuple[str, ...]:
    return tuple(b.opcode for b in iter_script_blocks(script))


def _lcs_length(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def classify_clone_pair(
    s1: Script, s2: Script, config: SmellConfig
) -> str | None:
    """Strictest matching clone type for a script pair, if any."""
    len1 = script_block_count(s1)
    len2 = script_block_count(s2)
    if len1 < config.clone_min_length or len2 < config.clone_min_length:
        return None
    ops1, ops2 = _opcode_sequence(s1), _opcode_sequence(s2)
    if ops1 == ops2:
        if script_signature(s1) == script_signature(s2):
            return "CloneType1"
        return "CloneType2"
    lcs = _lcs_length(ops1, ops2)
    gap = config.clone_type3_max_gap
    if len(ops1) - lcs <= gap and len(ops2) - lcs <= gap:
        return "CloneType3"
    return None


# ---------------------------------------------------------------------------
# Individual detectors


def _detect_duplicate_sprite(project: Project, config: SmellConfig):
    scripted: dict[tuple, list[Sprite]] = {}
    scriptless: dict[tuple, list[Sprite]] = {}
    for sprite in project.sprites:
        if sprite.scripts:
            key = tuple(sorted(script_signature(s) for s in sprite.scripts))
            scripted.setdefault(key, []).append(sprite)
        elif not sprite.orphan_stacks:
            scriptless.setdefault(sprite.costumes, []).append(sprite)
    for groups in (scripted, scriptless):
        for members in groups.values():
            if len(members) < 2:
                continue
            first = members[0]
            for extra in members[1:]:
                yield SmellFinding(
                    "DuplicateSprite",
                    project.project_id,
                    Location(extra.name),
                    f"duplicate of sprite {first.name!r}",
                )


def _detect_empty_sprite(project: Project, config: SmellConfig):
    for sprite in project.sprites:
        if not sprite.scripts and not sprite.orphan_stacks:
            yield SmellFinding(
                "EmptySprite",
                project.project_id,
                Location(sprite.name),
                "sprite has no code",
            )


# attribute -> (relative mutators, absolute setters)
_INIT_ATTRIBUTES: dict[str, tuple[frozenset[str], frozenset[str]]] = {
    "position": (
        frozenset({"motion_movesteps", "motion_changexby", "motion_changeyby"}),
        frozenset(
            {
                "motion_gotoxy",
                "motion_goto",
                "motion_glidesecstoxy",
                "motion_glideto",
                "motion_setx",
                "motion_sety",
            }
        ),
    ),
    "direction": (
        frozenset({"motion_turnright", "motion_turnleft"}),
        frozenset({"motion_pointindirection", "motion_pointtowards"}),
    ),
    "costume": (
        frozenset({"looks_nextcostume"}),
        frozenset({"looks_switchcostumeto"}),
    ),
    "size": (
        frozenset({"looks_changesizeby"}),
        frozenset({"looks_setsizeto"}),
    ),
    # visibility has no relative mutator; listed for completeness
    "visibility": (frozenset(), frozenset({"looks_show", "looks_hide"})),
}


def _menu_arg(block: Block, index: int = 0) -> str | None:
    if len(block.inputs) > index and isinstance(block.inputs[index], MenuSelection):
        return block.inputs[index].value
    return None


def _detect_missing_initialization(project: Project, config: SmellConfig):
    for sprite in project.targets():
        opcodes = set()
        changed_vars: set[str] = set()
        set_vars: set[str] = set()
        for block in iter_sprite_blocks(sprite):
            opcodes.add(block.opcode)
            if block.opcode == "data_changevariableby":
                name = _menu_arg(block)
                if name is not None:
                    changed_vars.add(name)
            elif block.opcode == "data_setvariableto":
                name = _menu_arg(block)
                if name is not None:
                    set_vars.add(name)
        for attribute, (relative, absolute) in _INIT_ATTRIBUTES.items():
            if opcodes & relative and not opcodes & absolute:
                yield SmellFinding(
                    "MissingInitialization",
                    project.project_id,
                    Location(sprite.name),
                    f"{attribute} is changed but never set",
                )
        for name in sorted(changed_vars - set_vars):
            yield SmellFinding(
                "MissingInitialization",
                project.project_id,
                Location(sprite.name),
                f"variable {name!r} is changed but never set",
            )


_DEFAULT_NAME_RE = re.compile(r"^(sprite|figur|objeto|lutin|actor)[0-9]*$", re.I)
_TRAILING_DIGITS_RE = re.compile(r"[0-9]+$")


def _detect_sprite_naming(project: Project, config: SmellConfig):
    flagged: dict[str, str] = {}
    for sprite in project.sprites:
        if _DEFAULT_NAME_RE.match(sprite.name):
            flagged.setdefault(sprite.name, "default sprite name")
    stems: dict[str, list[str]] = {}
    for sprite in project.sprites:
        stem = _TRAILING_DIGITS_RE.sub("", sprite.name).casefold()
        if stem:
            stems.setdefault(stem, []).append(sprite.name)
    for members in stems.values():
        if len(members) >= 2 and any(_TRAILING_DIGITS_RE.search(n) for n in members):
            for name in members:
                flagged.setdefault(name, "name only distinguished by a number")
    for sprite in project.sprites:  # preserve sprite order
        if sprite.name in flagged:
            yield SmellFinding(
                "SpriteNaming",
                project.project_id,
                Location(sprite.name),
                flagged[sprite.name],
            )


_STUTTER_MOVES = frozenset(
    {
        "motion_movesteps",
        "motion_turnright",
        "motion_turnleft",
        "motion_changexby",
        "motion_changeyby",
    }
)


def _detect_stuttering_movement(project: Project, config: SmellConfig):
    for sprite in project.targets():
        for index, script in enumerate(sprite.scripts):
            if (
                script.hat.opcode == "event_whenkeypressed"
                and len(script.body) == 1
                and script.body[0].opcode in _STUTTER_MOVES
            ):
                yield SmellFinding(
                    "StutteringMovement",
                    project.project_id,
                    Location(sprite.name, index),
                    "keypress moves once per press instead of smoothly",
                )


def _detect_clones(project: Project, config: SmellConfig):
    scripts: list[tuple[str, int, Script]] = []
    for sprite in project.targets():
        for index, script in enumerate(sprite.scripts):
            scripts.append((sprite.name, index, script))
    for i in range(len(scripts)):
        for j in range(i + 1, len(scripts)):
            name_a, idx_a, script_a = scripts[i]
            name_b, idx_b, script_b = scripts[j]
            clone_type = classify_clone_pair(script_a, script_b, config)
            if clone_type is not None:
                yield SmellFinding(
                    clone_type,
                    project.project_id,
                    Location(name_a, idx_a),
                    f"clone of script {idx_b} in sprite {name_b!r}",
                )


def _detect_dead_code(project: Project, config: SmellConfig):
    for sprite in project.targets():
        for index, stack in enumerate(sprite.orphan_stacks):
            size = sum(1 for b in stack for _ in iter_block_tree(b))
            yield SmellFinding(
                "DeadCode",
                project.project_id,
                Location(sprite.name, script_index=index),
                f"unreachable stack of {size} block(s)",
            )


def _detect_empty_script(project: Project, config: SmellConfig):
    for sprite in project.targets():
        for index, script in enumerate(sprite.scripts):
            if not script.body:
                yield SmellFinding(
                    "EmptyScript",
                    project.project_id,
                    Location(sprite.name, index),
                    "hat block with nothing underneath",
                )


def _detect_long_script(project: Project, config: SmellConfig):
    for sprite in project.targets():
        for index, script in enumerate(sprite.scripts):
            count = script_block_count(script)
            if count > config.long_script_threshold:
                yield SmellFinding(
                    "LongScript",
                    project.project_id,
                    Location(sprite.name, index),
                    f"script has {count} blocks "
                    f"(threshold {config.long_script_threshold})",
                )


_PEN_DRAW = frozenset({"pen_penDown", "pen_stamp"})


def _detect_missing_pen_up_erase_all(project: Project, config: SmellConfig):
    pen_down_at: Location | None = None
    pen_draw_at: Location | None = None
    has_pen_up = False
    erase_all_in_flag_script = False
    for sprite in project.targets():
        for block in iter_sprite_blocks(sprite):
            if block.opcode == "pen_penDown" and pen_down_at is None:
                pen_down_at = Location(sprite.name)
            if block.opcode in _PEN_DRAW and pen_draw_at is None:
                pen_draw_at = Location(sprite.name)
            if block.opcode == "pen_penUp":
                has_pen_up = True
        for script in sprite.scripts:
            if script.hat.opcode != "event_whenflagclicked":
                continue
            for block in iter_script_blocks(script):
                if block.opcode == "pen_clear":
                    erase_all_in_flag_script = True
    if pen_down_at is not None and not has_pen_up:
        yield SmellFinding(
            "MissingPenUpEraseAll",
            project.project_id,
            pen_down_at,
            "pen is put down but never lifted",
        )
    if pen_draw_at is not None and not erase_all_in_flag_script:
        yield SmellFinding(
            "MissingPenUpEraseAll",
            project.project_id,
            pen_draw_at,
            "pen drawing without erase-all in any flag script",
        )


_DETECTOR_FUNCS = {
    "DuplicateSprite": _detect_duplicate_sprite,
    "EmptySprite": _detect_empty_sprite,
    "MissingInitialization": _detect_missing_initialization,
    "SpriteNaming": _detect_sprite_naming,
    "StutteringMovement": _detect_stuttering_movement,
    "DeadCode": _detect_dead_code,
    "EmptyScript": _detect_empty_script,
    "LongScript": _detect_long_script,
    "MissingPenUpEraseAll": _detect_missing_pen_up_erase_all,
}


def detect_smells(
    project: Project, config: SmellConfig | None = None
) -> tuple[SmellFinding, ...]:
    """Run every detector; findings come out in fixed detector order."""
    config = config or SmellConfig()
    findings: list[SmellFinding] = []
    for detector in DETECTORS:
        if detector.startswith("CloneType"):
            continue
        findings.extend(_DETECTOR_FUNCS[detector](project, config))
    findings.extend(_detect_clones(project, config))
    order = {d: i for i, d in enumerate(DETECTORS)}
    findings.sort(key=lambda f: order[f.detector])
    return tuple(findings)


def count_by_detector(findings: tuple[SmellFinding, ...]) -> dict[str, int]:
    counts = {d: 0 for d in DETECTORS}
    for finding in findings:
        counts[finding.detector] += 1
    return counts


def write_smells_csv(
    per_project: list[tuple[str, tuple[SmellFinding, ...]]], path: str | Path
) -> None:
    """Rows of (project_id, detector, count), zeros included."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["project_id", "detector", "count"])
        for project_id, findings in per_project:
            counts = count_by_detector(findings)
            for detector in DETECTORS:
                writer.writerow([project_id, detector, counts[detector]])


def summarize_smells(
    per_project: list[tuple[str, str, tuple[SmellFinding, ...]]],
) -> list[tuple[str, str, float]]:
    """Mean findings per project for each (group, detector) pair."""
    group_sizes: dict[str, int] = {}
    totals: dict[tuple[str, str], int] = {}
    for _, group, findings in per_project:
        group_sizes[group] = group_sizes.get(group, 0) + 1
        counts = count_by_detector(findings)
        for detector, count in counts.items():
            key = (group, detector)
            totals[key] = totals.get(key, 0) + count
    rows: list[tuple[str, str, float]] = []
    for group in sorted(group_sizes):
        for detector in DETECTORS:
            mean = totals.get((group, detector), 0) / group_sizes[group]
            rows.append((group, detector, mean))
    return rows


def write_smells_summary_csv(
    rows: list[tuple[str, str, float]], path: str | Path
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "detector", "mean_per_project"])
        for group, detector, mean in rows:
            writer.writerow([group, detector, f"{mean:.2f}"])
