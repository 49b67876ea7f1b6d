"""Normalized project model shared by every analysis stage.

Projects from both supported archive dialects are parsed into one AST so
that downstream passes never see dialect-specific opcode spellings.  The
canonical opcode vocabulary follows the ``category_name`` convention of the
newer file format; legacy selectors are translated through a versioned
lookup table shipped as package data (``data/opcodes.csv``).

All model types are immutable after construction.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterator, Union

SB2 = "sb2"
SB3 = "sb3"
DIALECTS = (SB2, SB3)

# Palette drawers, in the fixed order used by report columns.
CATEGORIES = (
    "motion",
    "looks",
    "sound",
    "event",
    "control",
    "sensing",
    "operator",
    "data",
    "pen",
    "custom",
)

UNKNOWN_PREFIX = "unknown:"

# Opcodes that may start a script.  Mostly event blocks, plus the two
# non-event script heads (clone start and custom block definitions).
HAT_OPCODES = frozenset(
    {
        "event_whenflagclicked",
        "event_whenkeypressed",
        "event_whenthisspriteclicked",
        "event_whenstageclicked",
        "event_whenbackdropswitchesto",
        "event_whengreaterthan",
        "event_whenbroadcastreceived",
        "control_start_as_clone",
        "procedures_definition",
    }
)

LiteralValue = Union[int, float, str, bool]


class ModelError(ValueError):
    """Raised when an AST invariant is violated at construction time."""


@dataclass(frozen=True)
class Literal:
    """A constant typed into a block slot."""

    value: LiteralValue


@dataclass(frozen=True)
class MenuSelection:
    """A value picked from a dropdown (costume, key, variable name, ...)."""

    value: str


@dataclass(frozen=True)
class BlockRef:
    """A reporter block plugged into an input slot."""

    block: "Block"


Input = Union[Literal, MenuSelection, BlockRef]


@dataclass(frozen=True)
class Block:
    """One block: canonical opcode, ordered inputs, nested substacks.

    ``substacks`` holds the bodies of C-shaped blocks (up to two); it is
    empty for everything else.  Reporter blocks appear inside ``inputs``
    wrapped in :class:`BlockRef`, never in substacks.
    """

    opcode: str
    inputs: tuple[Input, ...] = ()
    substacks: tuple[tuple["Block", ...], ...] = ()

    @property
    def category(self) -> str:
        return block_category(self.opcode)


@dataclass(frozen=True)
class Script:
    """A hat block plus the stack hanging under it."""

    hat: Block
    body: tuple[Block, ...] = ()

    def __post_init__(self) -> None:
        if self.hat.opcode not in HAT_OPCODES:
            raise ModelError(f"script hat must be a hat block, got {self.hat.opcode!r}")


@dataclass(frozen=True)
class Sprite:
    """A sprite or the stage, with its assets, data and code."""

    name: str
    is_stage: bool = False
    costumes: tuple[str, ...] = ()
    sounds: tuple[str, ...] = ()
    variables: tuple[tuple[str, LiteralValue], ...] = ()
    lists: tuple[str, ...] = ()
    scripts: tuple[Script, ...] = ()
    orphan_stacks: tuple[tuple[Block, ...], ...] = ()


@dataclass(frozen=True)
class Project:
    """One parsed project: a stage plus zero or more sprites."""

    project_id: str
    name: str
    dialect: str
    stage: Sprite
    sprites: tuple[Sprite, ...] = ()

    def __post_init__(self) -> None:
        if self.dialect not in DIALECTS:
            raise ModelError(f"unknown dialect {self.dialect!r}")
        if not self.stage.is_stage:
            raise ModelError("stage sprite must have is_stage=True")
        names = [s.name for s in self.sprites]
        if any(s.is_stage for s in self.sprites):
            raise ModelError("sprite list must not contain the stage")
        if len(set(names)) != len(names):
            raise ModelError(f"sprite names not unique: {names}")

    def targets(self) -> tuple[Sprite, ...]:
        """Stage first, then sprites in file order."""
        return (self.stage,) + self.sprites


# ---------------------------------------------------------------------------
# Opcode table


@dataclass(frozen=True)
class OpcodeTable:
    """Raw-to-canonical opcode translation plus category lookup."""

    translation: dict[tuple[str, str], str]
    categories: dict[str, str]
    version: str = "1"


def _category_from_prefix(canonical: str) -> str | None:
    prefix = canonical.split("_", 1)[0]
    if prefix in CATEGORIES:
        return prefix
    if prefix == "music":
        return "sound"
    if prefix in ("procedures", "argument"):
        return "custom"
    return None


@lru_cache(maxsize=1)
def load_opcode_table() -> OpcodeTable:
    """Load the packaged translation table (cached)."""
    translation: dict[tuple[str, str], str] = {}
    categories: dict[str, str] = {}
    text = resources.files("scratchstats.data").joinpath("opcodes.csv").read_text("utf-8")
    for row in csv.DictReader(text.splitlines()):
        dialect = row["dialect"]
        if dialect not in DIALECTS:
            raise ModelError(f"bad dialect in opcode table: {dialect!r}")
        translation[(dialect, row["raw"])] = row["canonical"]
        categories[row["canonical"]] = row["category"]
    return OpcodeTable(translation=translation, categories=categories)


def normalize_opcode(dialect: str, raw: str, table: OpcodeTable | None = None) -> str:
    """Translate a raw opcode to canonical form.

    Unknown raw opcodes become ``unknown:<raw>`` rather than being dropped,
    so block counts stay honest for projects using exotic extensions.
    """
    table = table or load_opcode_table()
    canonical = table.translation.get((dialect, raw))
    if canonical is not None:
        return canonical
    return UNKNOWN_PREFIX + raw


def block_category(opcode: str) -> str:
    """Palette drawer for a canonical opcode; unknown opcodes are custom."""
    table = load_opcode_table()
    got = table.categories.get(opcode)
    if got is not None:
        return got
    if opcode.startswith(UNKNOWN_PREFIX):
        return "custom"
    return _category_from_prefix(opcode) or "custom"


# ---------------------------------------------------------------------------
# Traversal

# Canonical traversal order everywhere: the block itself, then reporters in
# input order (recursively), then substacks left to right.


def iter_block_tree(block: Block) -> Iterator[Block]:
    yield block
    for inp in block.inputs:
        if isinstance(inp, BlockRef):
            yield from iter_block_tree(inp.block)
    for stack in block.substacks:
        for child in stack:
            yield from iter_block_tree(child)


def iter_stack(blocks: tuple[Block, ...]) -> Iterator[Block]:
    for block in blocks:
        yield from iter_block_tree(block)


def iter_script_blocks(script: Script) -> Iterator[Block]:
    yield from iter_block_tree(script.hat)
    yield from iter_stack(script.body)


def iter_sprite_blocks(sprite: Sprite) -> Iterator[Block]:
    for script in sprite.scripts:
        yield from iter_script_blocks(script)
    for stack in sprite.orphan_stacks:
        yield from iter_stack(stack)


def iter_project_blocks(project: Project) -> Iterator[Block]:
    for sprite in project.targets():
        yield from iter_sprite_blocks(sprite)


def script_block_count(script: Script) -> int:
    return sum(1 for _ in iter_script_blocks(script))


# ---------------------------------------------------------------------------
# AST serialization (internal report format, round-trip safe)


def _input_to_dict(inp: Input) -> dict:
    if isinstance(inp, Literal):
        return {"kind": "literal", "value": inp.value}
    if isinstance(inp, MenuSelection):
        return {"kind": "menu", "value": inp.value}
    return {"kind": "block", "block": _block_to_dict(inp.block)}


def _input_from_dict(data: dict) -> Input:
    kind = data["kind"]
    if kind == "literal":
        return Literal(data["value"])
    if kind == "menu":
        return MenuSelection(data["value"])
    if kind == "block":
        return BlockRef(_block_from_dict(data["block"]))
    raise ModelError(f"unknown input kind {kind!r}")


def _block_to_dict(block: Block) -> dict:
    return {
        "opcode": block.opcode,
        "inputs": [_input_to_dict(i) for i in block.inputs],
        "substacks": [[_block_to_dict(b) for b in stack] for stack in block.substacks],
    }


def _block_from_dict(data: dict) -> Block:
    return Block(
        opcode=data["opcode"],
        inputs=tuple(_input_from_dict(i) for i in data["inputs"]),
        substacks=tuple(
            tuple(_block_from_dict(b) for b in stack) for stack in data["substacks"]
        ),
    )


def _sprite_to_dict(sprite: Sprite) -> dict:
    return {
        "name": sprite.name,
        "is_stage": sprite.is_stage,
        "costumes": list(sprite.costumes),
        "sounds": list(sprite.sounds),
        "variables": [[n, v] for n, v in sprite.variables],
        "lists": list(sprite.lists),
        "scripts": [
            {
                "hat": _block_to_dict(s.hat),
                "body": [_block_to_dict(b) for b in s.body],
            }
            for s in sprite.scripts
        ],
        "orphan_stacks": [
            [_block_to_dict(b) for b in stack] for stack in sprite.orphan_stacks
        ],
    }


def _sprite_from_dict(data: dict) -> Sprite:
    return Sprite(
        name=data["name"],
        is_stage=data["is_stage"],
        costumes=tuple(data["costumes"]),
        sounds=tuple(data["sounds"]),
        variables=tuple((n, v) for n, v in data["variables"]),
        lists=tuple(data["lists"]),
        scripts=tuple(
            Script(
                hat=_block_from_dict(s["hat"]),
                body=tuple(_block_from_dict(b) for b in s["body"]),
            )
            for s in data["scripts"]
        ),
        orphan_stacks=tuple(
            tuple(_block_from_dict(b) for b in stack) for stack in data["orphan_stacks"]
        ),
    )


def project_to_dict(project: Project) -> dict:
    return {
        "project_id": project.project_id,
        "name": project.name,
        "dialect": project.dialect,
        "stage": _sprite_to_dict(project.stage),
        "sprites": [_sprite_to_dict(s) for s in project.sprites],
    }


def project_from_dict(data: dict) -> Project:
    return Project(
        project_id=data["project_id"],
        name=data["name"],
        dialect=data["dialect"],
        stage=_sprite_from_dict(data["stage"]),
        sprites=tuple(_sprite_from_dict(s) for s in data["sprites"]),
    )


def project_to_json(project: Project, indent: int | None = 2) -> str:
    return json.dumps(project_to_dict(project), indent=indent, sort_keys=True)


def project_from_json(text: str) -> Project:
    return project_from_dict(json.loads(text))
