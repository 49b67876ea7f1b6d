"""Archive ingestion: zip detection, dialect parsing, corpus assembly.

Both dialects store a ``project.json`` inside a zip.  The legacy format
(sb2) nests sprites under the stage object and writes blocks as positional
arrays; the newer format (sb3) keeps a flat target list with id-linked
block dicts.  Parsing normalizes both into the same AST: canonical
opcodes, one input tuple per block in a fixed per-opcode argument order,
dropdown values as menu selections, and nested reporters as block inputs.

Nothing is silently dropped: every archive either yields a project or an
exclusion warning, and unknown opcodes are preserved under an
``unknown:`` prefix.
"""

from __future__ import annotations

import dataclasses
import io
import json
import re
import zipfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .model import (
    SB2,
    SB3,
    Block,
    BlockRef,
    HAT_OPCODES,
    Input,
    Literal,
    MenuSelection,
    Project,
    Script,
    Sprite,
    normalize_opcode,
)


class IngestError(Exception):
    """Base class for fatal ingestion failures."""


class NotAZipError(IngestError):
    pass


class MissingProjectJsonError(IngestError):
    pass


class AmbiguousDialectError(IngestError):
    pass


class MalformedJsonError(IngestError):
    pass


class MetadataParseError(IngestError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class EmptyCorpusError(IngestError):
    pass


# Warning codes that mean "this archive produced no project".
EXCLUSION_CODES = frozenset(
    {
        "not-a-zip",
        "missing-project-json",
        "ambiguous-dialect",
        "malformed-json",
        "default-unmodified",
        "duplicate-id",
    }
)

# Codes escalated to errors under --strict.
STRICT_CODES = frozenset(
    {
        "not-a-zip",
        "missing-project-json",
        "ambiguous-dialect",
        "malformed-json",
        "unsupported-feature",
    }
)


@dataclass(frozen=True)
class IngestWarning:
    code: str
    path: str
    detail: str = ""

    @property
    def excludes_archive(self) -> bool:
        return self.code in EXCLUSION_CODES


# ---------------------------------------------------------------------------
# Canonical argument layout.
#
# The canonical input order of a block follows the legacy positional order
# (which matches the wording on the block).  For sb3 the named inputs and
# fields are rearranged into that order via this table; unlisted opcodes
# keep their serialized order (inputs first, then fields).

ARG_ORDER: dict[str, tuple[str, ...]] = {
    "motion_goto": ("TO",),
    "motion_glideto": ("SECS", "TO"),
    "motion_glidesecstoxy": ("SECS", "X", "Y"),
    "motion_pointtowards": ("TOWARDS",),
    "motion_setrotationstyle": ("STYLE",),
    "looks_sayforsecs": ("MESSAGE", "SECS"),
    "looks_thinkforsecs": ("MESSAGE", "SECS"),
    "looks_switchcostumeto": ("COSTUME",),
    "looks_switchbackdropto": ("BACKDROP",),
    "looks_switchbackdroptoandwait": ("BACKDROP",),
    "looks_changeeffectby": ("EFFECT", "CHANGE"),
    "looks_seteffectto": ("EFFECT", "VALUE"),
    "looks_gotofrontback": ("FRONT_BACK",),
    "looks_goforwardbackwardlayers": ("FORWARD_BACKWARD", "NUM"),
    "looks_costumenumbername": ("NUMBER_NAME",),
    "looks_backdropnumbername": ("NUMBER_NAME",),
    "sound_play": ("SOUND_MENU",),
    "sound_playuntildone": ("SOUND_MENU",),
    "sound_changeeffectby": ("EFFECT", "VALUE"),
    "sound_seteffectto": ("EFFECT", "VALUE"),
    "music_playDrumForBeats": ("DRUM", "BEATS"),
    "music_playNoteForBeats": ("NOTE", "BEATS"),
    "music_setInstrument": ("INSTRUMENT",),
    "event_whenkeypressed": ("KEY_OPTION",),
    "event_whenbackdropswitchesto": ("BACKDROP",),
    "event_whengreaterthan": ("WHENGREATERTHANMENU", "VALUE"),
    "event_whenbroadcastreceived": ("BROADCAST_OPTION",),
    "event_broadcast": ("BROADCAST_INPUT",),
    "event_broadcastandwait": ("BROADCAST_INPUT",),
    "control_stop": ("STOP_OPTION",),
    "control_create_clone_of": ("CLONE_OPTION",),
    "sensing_touchingobject": ("TOUCHINGOBJECTMENU",),
    "sensing_distanceto": ("DISTANCETOMENU",),
    "sensing_keypressed": ("KEY_OPTION",),
    "sensing_of": ("PROPERTY", "OBJECT"),
    "sensing_current": ("CURRENTMENU",),
    "sensing_setdragmode": ("DRAG_MODE",),
    "operator_letter_of": ("LETTER", "STRING"),
    "operator_mathop": ("OPERATOR", "NUM"),
    "data_variable": ("VARIABLE",),
    "data_setvariableto": ("VARIABLE", "VALUE"),
    "data_changevariableby": ("VARIABLE", "VALUE"),
    "data_showvariable": ("VARIABLE",),
    "data_hidevariable": ("VARIABLE",),
    "data_listcontents": ("LIST",),
    "data_addtolist": ("ITEM", "LIST"),
    "data_deleteoflist": ("INDEX", "LIST"),
    "data_deletealloflist": ("LIST",),
    "data_insertatlist": ("ITEM", "INDEX", "LIST"),
    "data_replaceitemoflist": ("INDEX", "LIST", "ITEM"),
    "data_itemoflist": ("INDEX", "LIST"),
    "data_itemnumoflist": ("ITEM", "LIST"),
    "data_lengthoflist": ("LIST",),
    "data_listcontainsitem": ("LIST", "ITEM"),
    "data_showlist": ("LIST",),
    "data_hidelist": ("LIST",),
    "pen_changePenColorParamBy": ("COLOR_PARAM", "VALUE"),
    "pen_setPenColorParamTo": ("COLOR_PARAM", "VALUE"),
    "argument_reporter_string_number": ("VALUE",),
    "argument_reporter_boolean": ("VALUE",),
}

# Value-argument positions (after substack removal) that are dropdowns in
# the legacy positional encoding.
MENU_SLOTS: dict[str, frozenset[int]] = {
    "motion_goto": frozenset({0}),
    "motion_glideto": frozenset({1}),
    "motion_pointtowards": frozenset({0}),
    "motion_setrotationstyle": frozenset({0}),
    "looks_switchcostumeto": frozenset({0}),
    "looks_switchbackdropto": frozenset({0}),
    "looks_switchbackdroptoandwait": frozenset({0}),
    "looks_changeeffectby": frozenset({0}),
    "looks_seteffectto": frozenset({0}),
    "looks_gotofrontback": frozenset({0}),
    "looks_goforwardbackwardlayers": frozenset({0}),
    "looks_costumenumbername": frozenset({0}),
    "looks_backdropnumbername": frozenset({0}),
    "sound_play": frozenset({0}),
    "sound_playuntildone": frozenset({0}),
    "sound_changeeffectby": frozenset({0}),
    "sound_seteffectto": frozenset({0}),
    "music_playDrumForBeats": frozenset({0}),
    "music_playNoteForBeats": frozenset({0}),
    "music_setInstrument": frozenset({0}),
    "event_whenkeypressed": frozenset({0}),
    "event_whenbackdropswitchesto": frozenset({0}),
    "event_whengreaterthan": frozenset({0}),
    "event_whenbroadcastreceived": frozenset({0}),
    "event_broadcast": frozenset({0}),
    "event_broadcastandwait": frozenset({0}),
    "control_stop": frozenset({0}),
    "control_create_clone_of": frozenset({0}),
    "sensing_touchingobject": frozenset({0}),
    "sensing_distanceto": frozenset({0}),
    "sensing_keypressed": frozenset({0}),
    "sensing_of": frozenset({0, 1}),
    "sensing_current": frozenset({0}),
    "sensing_setdragmode": frozenset({0}),
    "operator_mathop": frozenset({0}),
    "data_variable": frozenset({0}),
    "data_setvariableto": frozenset({0}),
    "data_changevariableby": frozenset({0}),
    "data_showvariable": frozenset({0}),
    "data_hidevariable": frozenset({0}),
    "data_listcontents": frozenset({0}),
    "data_addtolist": frozenset({1}),
    "data_deleteoflist": frozenset({1}),
    "data_deletealloflist": frozenset({0}),
    "data_insertatlist": frozenset({2}),
    "data_replaceitemoflist": frozenset({1}),
    "data_itemoflist": frozenset({1}),
    "data_itemnumoflist": frozenset({1}),
    "data_lengthoflist": frozenset({0}),
    "data_listcontainsitem": frozenset({0}),
    "data_showlist": frozenset({0}),
    "data_hidelist": frozenset({0}),
    "pen_changePenColorParamBy": frozenset({0}),
    "pen_setPenColorParamTo": frozenset({0}),
    "procedures_definition": frozenset({0}),
    "procedures_call": frozenset({0}),
    "argument_reporter_string_number": frozenset({0}),
    "argument_reporter_boolean": frozenset({0}),
}

# How many substacks each C-block carries; bodies are padded to this count
# so an empty branch parses identically in both dialects.
SUBSTACK_COUNT = {
    "control_forever": 1,
    "control_repeat": 1,
    "control_repeat_until": 1,
    "control_if": 1,
    "control_if_else": 2,
}

_INT_RE = re.compile(r"^[+-]?[0-9]+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def normalize_literal(value) -> int | float | str | bool:
    """Fold numeric strings into numbers so both dialects agree on types."""
    if isinstance(value, bool) or isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        s = value.strip()
        if _INT_RE.match(s):
            try:
                return int(s)
            except ValueError:
                return value
        if _FLOAT_RE.match(s):
            return float(s)
    return value


# ---------------------------------------------------------------------------
# Dialect detection


def detect_dialect(data: bytes) -> str:
    """Sniff the archive dialect from the embedded project.json."""
    root = _read_project_json(data)
    is_sb3 = isinstance(root, dict) and isinstance(root.get("targets"), list)
    is_sb2 = isinstance(root, dict) and "objName" in root
    if is_sb3 == is_sb2:
        raise AmbiguousDialectError("project.json matches neither or both dialects")
    return SB3 if is_sb3 else SB2


def _read_project_json(data: bytes) -> dict:
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise NotAZipError(str(exc)) from exc
    with archive:
        names = archive.namelist()
        candidates = [n for n in names if n == "project.json"]
        if not candidates:
            candidates = [n for n in names if n.endswith("/project.json")]
        if not candidates:
            raise MissingProjectJsonError("no project.json entry in archive")
        try:
            return json.loads(archive.read(candidates[0]).decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as exc:
            raise MalformedJsonError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Shared parser state


class _ParseContext:
    def __init__(self, path: str):
        self.path = path
        self.unknown_opcodes: dict[str, int] = {}
        self.unsupported: list[str] = []

    def note_unknown(self, raw: str) -> None:
        self.unknown_opcodes[raw] = self.unknown_opcodes.get(raw, 0) + 1

    def warnings(self) -> list[IngestWarning]:
        out: list[IngestWarning] = []
        if self.unknown_opcodes:
            items = ", ".join(
                f"{op} x{n}" for op, n in sorted(self.unknown_opcodes.items())
            )
            out.append(IngestWarning("unknown-opcode", self.path, items))
        for detail in self.unsupported:
            out.append(IngestWarning("unsupported-feature", self.path, detail))
        return out


def _is_menu_slot(opcode: str, index: int) -> bool:
    return index in MENU_SLOTS.get(opcode, frozenset())


def _pad_substacks(
    opcode: str, stacks: list[tuple[Block, ...]]
) -> tuple[tuple[Block, ...], ...]:
    want = SUBSTACK_COUNT.get(opcode, 0)
    while len(stacks) < want:
        stacks.append(())
    return tuple(stacks)


# ---------------------------------------------------------------------------
# sb2 parser


def _parse_sb2_block(raw_block: list, ctx: _ParseContext) -> Block:
    selector = raw_block[0]
    opcode = normalize_opcode(SB2, selector)
    if opcode.startswith("unknown:"):
        ctx.note_unknown(selector)
    args = raw_block[1:]

    if opcode == "procedures_definition":
        # [proccode, param names, defaults, atomic] - keep the signature only
        proccode = args[0] if args else ""
        return Block(opcode, (MenuSelection(str(proccode)),), ())
    if opcode == "argument_reporter_string_number":
        name = args[0] if args else ""
        return Block(opcode, (MenuSelection(str(name)),), ())

    inputs: list[Input] = []
    stacks: list[tuple[Block, ...]] = []
    value_index = 0
    for arg in args:
        if isinstance(arg, list):
            if arg and isinstance(arg[0], str):
                inputs.append(BlockRef(_parse_sb2_block(arg, ctx)))
                value_index += 1
            else:
                stacks.append(tuple(_parse_sb2_block(b, ctx) for b in arg))
        elif arg is None:
            stacks.append(())
        else:
            if isinstance(arg, str) and _is_menu_slot(opcode, value_index):
                inputs.append(MenuSelection(arg))
            else:
                inputs.append(Literal(normalize_literal(arg)))
            value_index += 1
    return Block(opcode, tuple(inputs), _pad_substacks(opcode, stacks))


def _parse_sb2_target(obj: dict, is_stage: bool, ctx: _ParseContext) -> Sprite:
    scripts: list[Script] = []
    orphans: list[tuple[Block, ...]] = []
    for entry in obj.get("scripts") or []:
        raw_stack = entry[2] if len(entry) >= 3 else []
        if not raw_stack:
            continue
        blocks = tuple(_parse_sb2_block(b, ctx) for b in raw_stack)
        head = blocks[0].opcode
        if is_stage and head == "event_whenthisspriteclicked":
            blocks = (Block("event_whenstageclicked", (), ()),) + blocks[1:]
            head = "event_whenstageclicked"
        if head in HAT_OPCODES:
            scripts.append(Script(hat=blocks[0], body=blocks[1:]))
        else:
            orphans.append(blocks)
    return Sprite(
        name=str(obj.get("objName", "")),
        is_stage=is_stage,
        costumes=tuple(str(c.get("costumeName", "")) for c in obj.get("costumes") or []),
        sounds=tuple(str(s.get("soundName", "")) for s in obj.get("sounds") or []),
        variables=tuple(
            (str(v.get("name", "")), normalize_literal(v.get("value", 0)))
            for v in obj.get("variables") or []
        ),
        lists=tuple(str(l.get("listName", "")) for l in obj.get("lists") or []),
        scripts=tuple(scripts),
        orphan_stacks=tuple(orphans),
    )


def _parse_sb2(root: dict, project_id: str, ctx: _ParseContext) -> Project:
    stage = _parse_sb2_target(root, True, ctx)
    sprites: list[Sprite] = []
    for child in root.get("children") or []:
        if not isinstance(child, dict):
            continue
        if "objName" in child and "cmd" not in child and "listName" not in child:
            sprites.append(_parse_sb2_target(child, False, ctx))
        elif "cmd" in child or "listName" in child or "target" in child:
            continue  # stage monitor / list watcher
        else:
            ctx.unsupported.append(f"unrecognized stage child: {sorted(child)[:3]}")
    sprites = _dedupe_sprite_names(sprites, ctx)
    return Project(
        project_id=project_id,
        name=project_id,
        dialect=SB2,
        stage=stage,
        sprites=tuple(sprites),
    )


# ---------------------------------------------------------------------------
# sb3 parser

_SB3_NUM_CODES = {4, 5, 6, 7, 8}


def _sb3_primitive(prim: list, ctx: _ParseContext) -> Input | None:
    code = prim[0] if prim else None
    value = prim[1] if len(prim) > 1 else None
    if code in _SB3_NUM_CODES:
        return Literal(normalize_literal(value if value is not None else ""))
    if code == 9:  # color
        return Literal(str(value))
    if code == 10:  # free text
        return Literal(normalize_literal(str(value)))
    if code == 11:  # broadcast
        return MenuSelection(str(value))
    if code == 12:  # variable reporter
        return BlockRef(Block("data_variable", (MenuSelection(str(value)),), ()))
    if code == 13:  # list reporter
        return BlockRef(Block("data_listcontents", (MenuSelection(str(value)),), ()))
    ctx.unsupported.append(f"input primitive code {code!r}")
    return None


class _Sb3Target:
    """Holds the raw block dict of one target during parsing."""

    def __init__(self, obj: dict, ctx: _ParseContext):
        self.obj = obj
        self.ctx = ctx
        raw = obj.get("blocks") or {}
        self.blocks = {k: v for k, v in raw.items()}

    def _resolve_input(self, desc) -> Input | None:
        if not isinstance(desc, list) or len(desc) < 2:
            return None
        value = desc[1]
        if value is None:
            return None
        if isinstance(value, list):
            return _sb3_primitive(value, self.ctx)
        if isinstance(value, str):  # block id
            ref = self.blocks.get(value)
            if ref is None:
                return None
            if isinstance(ref, list):
                return _sb3_primitive(ref, self.ctx)
            if ref.get("shadow") and ref.get("fields"):
                fields = ref["fields"]
                if len(fields) == 1 and not ref.get("inputs"):
                    (fval,) = fields.values()
                    return MenuSelection(str(fval[0]))
            return BlockRef(self._parse_block(value, as_reporter=True))
        return None

    def _proccode(self, block: dict) -> str:
        return str((block.get("mutation") or {}).get("proccode", ""))

    def _parse_block(self, block_id: str, as_reporter: bool = False) -> Block:
        raw = self.blocks[block_id]
        raw_opcode = raw.get("opcode", "")
        opcode = normalize_opcode(SB3, raw_opcode)
        if opcode.startswith("unknown:"):
            self.ctx.note_unknown(raw_opcode)

        raw_inputs: dict = raw.get("inputs") or {}
        raw_fields: dict = raw.get("fields") or {}

        stacks: list[tuple[Block, ...]] = []
        for position, name in enumerate(("SUBSTACK", "SUBSTACK2")):
            if name in raw_inputs:
                desc = raw_inputs[name]
                head = desc[1] if isinstance(desc, list) and len(desc) > 1 else None
                # keep the arm's position: a filled else branch may arrive
                # without any SUBSTACK key for the empty if branch
                while len(stacks) < position:
                    stacks.append(())
                stacks.append(self._parse_chain(head) if isinstance(head, str) else ())

        if opcode == "procedures_definition":
            proto_desc = raw_inputs.get("custom_block")
            proccode = ""
            if isinstance(proto_desc, list) and len(proto_desc) > 1 and isinstance(
                proto_desc[1], str
            ):
                proto = self.blocks.get(proto_desc[1])
                if isinstance(proto, dict):
                    proccode = self._proccode(proto)
            return Block(opcode, (MenuSelection(proccode),), ())

        slot_values: dict[str, Input] = {}
        ordered_names: list[str] = []
        for name, desc in raw_inputs.items():
            if name in ("SUBSTACK", "SUBSTACK2", "custom_block"):
                continue
            inp = self._resolve_input(desc)
            if inp is not None:
                slot_values[name] = inp
                ordered_names.append(name)
        for name, fval in raw_fields.items():
            value = fval[0] if isinstance(fval, list) and fval else fval
            slot_values[name] = MenuSelection(str(value))
            ordered_names.append(name)

        order = ARG_ORDER.get(opcode)
        inputs: list[Input] = []
        if opcode == "procedures_call":
            inputs.append(MenuSelection(self._proccode(raw)))
            inputs.extend(slot_values[n] for n in ordered_names)
        elif order is not None:
            for name in order:
                if name in slot_values:
                    inputs.append(slot_values[name])
            for name in ordered_names:  # anything the table missed
                if name not in order:
                    inputs.append(slot_values[name])
        else:
            inputs.extend(slot_values[n] for n in ordered_names)

        return Block(opcode, tuple(inputs), _pad_substacks(opcode, stacks))

    def _parse_chain(self, head_id: str | None) -> tuple[Block, ...]:
        out: list[Block] = []
        seen: set[str] = set()
        cursor = head_id
        while isinstance(cursor, str) and cursor in self.blocks and cursor not in seen:
            seen.add(cursor)
            raw = self.blocks[cursor]
            if isinstance(raw, list):
                prim = _sb3_primitive(raw, self.ctx)
                if isinstance(prim, BlockRef):
                    out.append(prim.block)
                break
            out.append(self._parse_block(cursor))
            cursor = raw.get("next")
        return tuple(out)

    def parse(self) -> Sprite:
        obj = self.obj
        scripts: list[Script] = []
        orphans: list[tuple[Block, ...]] = []
        for block_id, raw in self.blocks.items():
            if isinstance(raw, list):
                # floating reporter stored in compact array form
                prim = _sb3_primitive(raw, self.ctx)
                if isinstance(prim, BlockRef):
                    orphans.append((prim.block,))
                continue
            if not raw.get("topLevel") or raw.get("shadow"):
                continue
            chain = self._parse_chain(block_id)
            if not chain:
                continue
            if chain[0].opcode in HAT_OPCODES:
                scripts.append(Script(hat=chain[0], body=chain[1:]))
            else:
                orphans.append(chain)
        return Sprite(
            name=str(obj.get("name", "")),
            is_stage=bool(obj.get("isStage")),
            costumes=tuple(str(c.get("name", "")) for c in obj.get("costumes") or []),
            sounds=tuple(str(s.get("name", "")) for s in obj.get("sounds") or []),
            variables=tuple(
                (str(v[0]), normalize_literal(v[1]) if len(v) > 1 else 0)
                for v in (obj.get("variables") or {}).values()
            ),
            lists=tuple(str(v[0]) for v in (obj.get("lists") or {}).values()),
            scripts=tuple(scripts),
            orphan_stacks=tuple(orphans),
        )


def _parse_sb3(root: dict, project_id: str, ctx: _ParseContext) -> Project:
    stage: Sprite | None = None
    sprites: list[Sprite] = []
    for target in root.get("targets") or []:
        sprite = _Sb3Target(target, ctx).parse()
        if sprite.is_stage:
            if stage is not None:
                ctx.unsupported.append("multiple stage targets; extra treated as sprite")
                sprites.append(dataclasses.replace(sprite, is_stage=False))
                continue
            stage = sprite
        else:
            sprites.append(sprite)
    if stage is None:
        stage = Sprite(name="Stage", is_stage=True)
        ctx.unsupported.append("no stage target; synthesized an empty one")
    sprites = _dedupe_sprite_names(sprites, ctx)
    return Project(
        project_id=project_id,
        name=project_id,
        dialect=SB3,
        stage=stage,
        sprites=tuple(sprites),
    )


def _dedupe_sprite_names(sprites: list[Sprite], ctx: _ParseContext) -> list[Sprite]:
    seen: dict[str, int] = {}
    out: list[Sprite] = []
    for sprite in sprites:
        name = sprite.name
        if name in seen:
            seen[name] += 1
            new_name = f"{name}~{seen[name]}"
            ctx.unsupported.append(
                f"duplicate sprite name {name!r} renamed to {new_name!r}"
            )
            sprite = dataclasses.replace(sprite, name=new_name)
        else:
            seen[name] = 1
        out.append(sprite)
    return out


# ---------------------------------------------------------------------------
# Project / corpus loading


def load_project(path: str | Path) -> tuple[Project, list[IngestWarning]]:
    """Parse one archive.  Raises IngestError subclasses on fatal issues."""
    path = Path(path)
    data = path.read_bytes()
    dialect = detect_dialect(data)
    root = _read_project_json(data)
    ctx = _ParseContext(str(path))
    if dialect == SB2:
        project = _parse_sb2(root, path.stem, ctx)
    else:
        project = _parse_sb3(root, path.stem, ctx)
    return project, ctx.warnings()


_DEFAULT_SPRITE_RE = re.compile(r"^(sprite|figur|cat|objeto|lutin|actor)[0-9]*$", re.I)
_DEFAULT_COSTUMES = frozenset({"costume1", "costume2", "kostüm1", "kostüm2"})
_DEFAULT_BACKDROPS = frozenset({"backdrop1", "hintergrund1", "bühnenbild1"})
_DEFAULT_SOUNDS = frozenset({"meow", "miau", "pop", "plopp"})


def is_default_unmodified(project: Project) -> bool:
    """True for an untouched new project: one default sprite, no code.

    Projects with renamed sprites, any block, any variable, or any
    self-made asset (for example a painted backdrop) do not qualify.
    """
    targets = project.targets()
    if any(t.scripts or t.orphan_stacks for t in targets):
        return False
    if any(t.variables or t.lists for t in targets):
        return False
    if len(project.sprites) != 1:
        return False
    sprite = project.sprites[0]
    if not _DEFAULT_SPRITE_RE.match(sprite.name):
        return False
    if not all(c.lower() in _DEFAULT_COSTUMES for c in sprite.costumes):
        return False
    if not all(c.lower() in _DEFAULT_BACKDROPS for c in project.stage.costumes):
        return False
    for target in targets:
        if not all(s.lower() in _DEFAULT_SOUNDS for s in target.sounds):
            return False
    return True


@dataclass(frozen=True)
class MetadataRow:
    project_id: str
    group: str
    age: int | None


def read_metadata(path: str | Path) -> dict[str, MetadataRow]:
    """Read the headered metadata CSV (project_id, group, age)."""
    import csv as _csv

    rows: dict[str, MetadataRow] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MetadataParseError("empty metadata file", 1) from None
        if [h.strip() for h in header] != ["project_id", "group", "age"]:
            raise MetadataParseError(
                f"expected header project_id,group,age got {header}", 1
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise MetadataParseError(f"expected 3 fields, got {len(row)}", lineno)
            project_id, group, age_raw = (c.strip() for c in row)
            if not project_id:
                raise MetadataParseError("empty project_id", lineno)
            if project_id in rows:
                raise MetadataParseError(f"duplicate project_id {project_id!r}", lineno)
            age: int | None = None
            if age_raw:
                try:
                    age = int(age_raw)
                except ValueError:
                    raise MetadataParseError(
                        f"age must be an integer, got {age_raw!r}", lineno
                    ) from None
            rows[project_id] = MetadataRow(project_id, group or "unknown", age)
    return rows


@dataclass(frozen=True)
class Corpus:
    """All loaded projects plus their metadata and ingest diagnostics."""

    projects: tuple[Project, ...]
    metadata: dict[str, MetadataRow] = field(default_factory=dict)
    warnings: tuple[IngestWarning, ...] = ()

    def group_of(self, project_id: str) -> str:
        row = self.metadata.get(project_id)
        return row.group if row else "unknown"

    def age_of(self, project_id: str) -> int | None:
        row = self.metadata.get(project_id)
        return row.age if row else None

    def groups(self) -> tuple[str, ...]:
        return tuple(sorted({self.group_of(p.project_id) for p in self.projects}))


def _load_one(path: Path) -> tuple[Path, Project | None, list[IngestWarning]]:
    try:
        project, warnings = load_project(path)
    except NotAZipError as exc:
        return path, None, [IngestWarning("not-a-zip", str(path), str(exc))]
    except MissingProjectJsonError as exc:
        return path, None, [IngestWarning("missing-project-json", str(path), str(exc))]
    except AmbiguousDialectError as exc:
        return path, None, [IngestWarning("ambiguous-dialect", str(path), str(exc))]
    except MalformedJsonError as exc:
        return path, None, [IngestWarning("malformed-json", str(path), str(exc))]
    if is_default_unmodified(project):
        return (
            path,
            None,
            warnings
            + [IngestWarning("default-unmodified", str(path), "excluded from corpus")],
        )
    return path, project, warnings


def find_archives(project_dir: str | Path) -> list[Path]:
    project_dir = Path(project_dir)
    if not project_dir.is_dir():
        raise IngestError(f"input directory {project_dir} does not exist")
    return sorted(
        p for p in project_dir.iterdir() if p.suffix.lower() in (".sb2", ".sb3")
    )


def load_corpus(
    project_dir: str | Path,
    metadata_path: str | Path | None = None,
    strict: bool = False,
    jobs: int = 1,
) -> Corpus:
    """Load every archive in a directory into a corpus, sorted by id.

    Every archive is accounted for: it either contributes a project or an
    exclusion warning.  With ``strict`` set, warnings in STRICT_CODES are
    raised as errors instead.
    """
    archives = find_archives(project_dir)
    if not archives:
        raise EmptyCorpusError(f"no .sb2/.sb3 archives in {project_dir}")

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_load_one, archives))
    else:
        results = [_load_one(p) for p in archives]

    warnings: list[IngestWarning] = []
    projects: list[Project] = []
    seen_ids: set[str] = set()
    for path, project, wlist in results:
        warnings.extend(wlist)
        if project is None:
            continue
        if project.project_id in seen_ids:
            warnings.append(
                IngestWarning("duplicate-id", str(path), "archive with same stem kept")
            )
            continue
        seen_ids.add(project.project_id)
        projects.append(project)

    if strict:
        for w in warnings:
            if w.code in STRICT_CODES:
                raise IngestError(f"[strict] {w.code}: {w.path} {w.detail}")

    metadata: dict[str, MetadataRow] = {}
    if metadata_path is not None:
        metadata = read_metadata(metadata_path)
    for project in projects:
        if metadata_path is not None and project.project_id not in metadata:
            warnings.append(
                IngestWarning(
                    "missing-metadata", project.project_id, "group set to 'unknown'"
                )
            )

    projects.sort(key=lambda p: p.project_id)
    return Corpus(
        projects=tuple(projects), metadata=metadata, warnings=tuple(warnings)
    )
