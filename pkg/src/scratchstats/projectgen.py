"""Synthetic project construction for tests, demos and benchmarks.

Three layers:

* builder helpers (``lit``, ``menu``, ``ref``, ``block``, ``script``) for
  writing ASTs by hand,
* serializers that emit real ``.sb2``/``.sb3`` archives which parse back
  to the same AST,
* random generators (whole projects and control-structure scripts) plus a
  small two-group demo corpus with planted metric differences.

Serializer restrictions: legacy output requires every opcode to have a
legacy spelling, dropdown values may only sit in registered dropdown
slots, and string literals must not look numeric (the reader folds such
strings into numbers).  The builders enforce this by construction.
"""

from __future__ import annotations

import itertools
import json
import random
import zipfile
from functools import lru_cache
from pathlib import Path

from .ingest import ARG_ORDER, MENU_SLOTS, normalize_literal
from .model import (
    SB2,
    SB3,
    Block,
    BlockRef,
    Input,
    Literal,
    MenuSelection,
    Project,
    Script,
    Sprite,
    load_opcode_table,
)

# ---------------------------------------------------------------------------
# Builders


def lit(value) -> Literal:
    """Literal input; numeric strings fold to numbers up front."""
    return Literal(normalize_literal(value))


def menu(value: str) -> MenuSelection:
    return MenuSelection(str(value))


def block(opcode: str, *inputs: Input, subs: tuple[tuple[Block, ...], ...] = ()) -> Block:
    padded = list(subs)
    from .ingest import SUBSTACK_COUNT

    while len(padded) < SUBSTACK_COUNT.get(opcode, 0):
        padded.append(())
    return Block(opcode=opcode, inputs=tuple(inputs), substacks=tuple(padded))


def ref(opcode: str, *inputs: Input) -> BlockRef:
    return BlockRef(block(opcode, *inputs))


def script(hat_opcode: str, *body: Block, hat_inputs: tuple[Input, ...] = ()) -> Script:
    return Script(hat=block(hat_opcode, *hat_inputs), body=tuple(body))


def sprite(name: str, *scripts: Script, **kwargs) -> Sprite:
    return Sprite(name=name, scripts=tuple(scripts), **kwargs)


def make_project(
    project_id: str,
    sprites: tuple[Sprite, ...] = (),
    stage: Sprite | None = None,
    dialect: str = SB3,
) -> Project:
    if stage is None:
        stage = Sprite(name="Stage", is_stage=True, costumes=("backdrop1",))
    return Project(
        project_id=project_id,
        name=project_id,
        dialect=dialect,
        stage=stage,
        sprites=sprites,
    )


# ---------------------------------------------------------------------------
# sb3 serialization


def _sb3_primitive(value) -> list:
    if isinstance(value, bool):
        raise ValueError("boolean literals have no archive encoding")
    if isinstance(value, (int, float)):
        return [4, str(value)]
    return [10, str(value)]


class _Sb3Writer:
    def __init__(self) -> None:
        self.blocks: dict[str, dict] = {}
        self.counter = 0

    def _next_id(self) -> str:
        self.counter += 1
        return f"b{self.counter}"

    def _menu_shadow(self, parent: str, slot: str, value: str) -> str:
        mid = self._next_id()
        self.blocks[mid] = {
            "opcode": f"{slot.lower()}_menu",
            "next": None,
            "parent": parent,
            "inputs": {},
            "fields": {slot: [value, None]},
            "shadow": True,
            "topLevel": False,
        }
        return mid

    def emit_block(self, blk: Block, parent: str | None, top: bool, xy=(0, 0)) -> str:
        bid = self._next_id()
        entry: dict = {
            "opcode": blk.opcode,
            "next": None,
            "parent": parent,
            "inputs": {},
            "fields": {},
            "shadow": False,
            "topLevel": top,
        }
        if top:
            entry["x"], entry["y"] = xy
        self.blocks[bid] = entry

        if blk.opcode == "procedures_definition":
            proto_id = self._next_id()
            self.blocks[proto_id] = {
                "opcode": "procedures_prototype",
                "next": None,
                "parent": bid,
                "inputs": {},
                "fields": {},
                "shadow": True,
                "topLevel": False,
                "mutation": {
                    "tagName": "mutation",
                    "proccode": blk.inputs[0].value,
                    "argumentids": "[]",
                },
            }
            entry["inputs"]["custom_block"] = [1, proto_id]
            return bid

        if blk.opcode == "procedures_call":
            arg_inputs = blk.inputs[1:]
            entry["mutation"] = {
                "tagName": "mutation",
                "proccode": blk.inputs[0].value,
                "argumentids": json.dumps([f"arg{i}" for i in range(len(arg_inputs))]),
            }
            for i, inp in enumerate(arg_inputs):
                if isinstance(inp, Literal):
                    entry["inputs"][f"arg{i}"] = [1, _sb3_primitive(inp.value)]
                elif isinstance(inp, BlockRef):
                    entry["inputs"][f"arg{i}"] = [2, self.emit_block(inp.block, bid, False)]
                else:
                    raise ValueError("call arguments must be literals or reporters")
            return bid

        names = ARG_ORDER.get(blk.opcode)
        if names is None or len(names) < len(blk.inputs):
            names = tuple(f"ARG{i}" for i in range(len(blk.inputs)))
        for name, inp in zip(names, blk.inputs):
            if isinstance(inp, MenuSelection):
                if name == "BROADCAST_INPUT":
                    entry["inputs"][name] = [1, [11, inp.value, f"bc_{inp.value}"]]
                elif blk.opcode in ARG_ORDER:
                    entry["fields"][name] = [inp.value, None]
                else:
                    entry["inputs"][name] = [1, self._menu_shadow(bid, name, inp.value)]
            elif isinstance(inp, Literal):
                entry["inputs"][name] = [1, _sb3_primitive(inp.value)]
            else:
                entry["inputs"][name] = [2, self.emit_block(inp.block, bid, False)]
        for i, stack in enumerate(blk.substacks):
            if stack:
                head = self.emit_chain(stack, bid)
                entry["inputs"]["SUBSTACK" if i == 0 else "SUBSTACK2"] = [2, head]
        return bid

    def emit_chain(self, blocks: tuple[Block, ...], parent: str | None) -> str:
        ids = []
        prev: str | None = None
        for blk in blocks:
            bid = self.emit_block(blk, prev if prev else parent, False)
            if prev:
                self.blocks[prev]["next"] = bid
            ids.append(bid)
            prev = bid
        return ids[0]

    def emit_top(self, blocks: tuple[Block, ...], xy) -> None:
        prev: str | None = None
        for blk in blocks:
            bid = self.emit_block(blk, prev, prev is None, xy)
            if prev:
                self.blocks[prev]["next"] = bid
            prev = bid


def _sb3_target(target: Sprite, layer: int) -> dict:
    writer = _Sb3Writer()
    y = 0
    for s in target.scripts:
        writer.emit_top((s.hat,) + s.body, (0, y))
        y += 200
    for stack in target.orphan_stacks:
        writer.emit_top(stack, (400, y))
        y += 200
    return {
        "isStage": target.is_stage,
        "name": target.name,
        "variables": {
            f"var{i}": [name, value] for i, (name, value) in enumerate(target.variables)
        },
        "lists": {f"list{i}": [name, []] for i, name in enumerate(target.lists)},
        "broadcasts": {},
        "blocks": writer.blocks,
        "comments": {},
        "currentCostume": 0,
        "costumes": [
            {"name": c, "dataFormat": "svg", "assetId": "0" * 32, "md5ext": "0" * 32 + ".svg"}
            for c in target.costumes
        ],
        "sounds": [
            {"name": s, "dataFormat": "wav", "assetId": "0" * 32, "md5ext": "0" * 32 + ".wav"}
            for s in target.sounds
        ],
        "volume": 100,
        "layerOrder": layer,
    }


def project_to_sb3_dict(project: Project) -> dict:
    targets = [_sb3_target(project.stage, 0)]
    targets.extend(
        _sb3_target(s, i + 1) for i, s in enumerate(project.sprites)
    )
    return {
        "targets": targets,
        "monitors": [],
        "extensions": [],
        "meta": {"semver": "3.0.0", "vm": "0.2.0", "agent": ""},
    }


# ---------------------------------------------------------------------------
# sb2 serialization


@lru_cache(maxsize=1)
def _sb2_reverse() -> dict[str, str]:
    table = load_opcode_table()
    reverse: dict[str, str] = {}
    for (dialect, raw), canonical in table.translation.items():
        if dialect == SB2:
            reverse.setdefault(canonical, raw)
    return reverse


def _sb2_encode_block(blk: Block, is_stage: bool) -> list:
    op = blk.opcode
    if op == "procedures_definition":
        return ["procDef", blk.inputs[0].value, [], [], False]
    if op == "argument_reporter_string_number":
        return ["getParam", blk.inputs[0].value, "r"]
    if op == "event_whenstageclicked":
        if not is_stage:
            raise ValueError("stage-clicked hat on a sprite")
        return ["whenClicked"]

    raw = _sb2_reverse().get(op)
    if raw is None:
        raise ValueError(f"no legacy spelling for opcode {op!r}")
    out: list = [raw]
    menu_slots = MENU_SLOTS.get(op, frozenset())
    value_index = 0
    for inp in blk.inputs:
        if isinstance(inp, MenuSelection):
            if value_index not in menu_slots:
                raise ValueError(f"{op}: slot {value_index} is not a dropdown")
            out.append(inp.value)
            value_index += 1
        elif isinstance(inp, Literal):
            if isinstance(inp.value, bool):
                raise ValueError("boolean literals have no archive encoding")
            if isinstance(inp.value, str):
                if value_index in menu_slots:
                    raise ValueError(f"{op}: string literal in dropdown slot")
                if normalize_literal(inp.value) != inp.value:
                    raise ValueError(f"numeric-looking string literal {inp.value!r}")
            out.append(inp.value)
            value_index += 1
        else:
            out.append(_sb2_encode_block(inp.block, is_stage))
            value_index += 1
    for stack in blk.substacks:
        out.append([_sb2_encode_block(b, is_stage) for b in stack] or None)
    return out


def _sb2_target(target: Sprite, index: int) -> dict:
    scripts = []
    y = 10
    for s in target.scripts:
        scripts.append([10, y, [_sb2_encode_block(b, target.is_stage) for b in (s.hat,) + s.body]])
        y += 200
    for stack in target.orphan_stacks:
        scripts.append([400, y, [_sb2_encode_block(b, target.is_stage) for b in stack]])
        y += 200
    out: dict = {
        "objName": target.name,
        "variables": [
            {"name": n, "value": v, "isPersistent": False} for n, v in target.variables
        ],
        "lists": [
            {"listName": n, "contents": [], "isPersistent": False} for n in target.lists
        ],
        "scripts": scripts,
        "costumes": [{"costumeName": c, "baseLayerID": i} for i, c in enumerate(target.costumes)],
        "sounds": [{"soundName": s, "soundID": i} for i, s in enumerate(target.sounds)],
        "currentCostumeIndex": 0,
    }
    if not target.is_stage:
        out.update(
            {
                "scratchX": 0,
                "scratchY": 0,
                "scale": 1,
                "direction": 90,
                "rotationStyle": "normal",
                "isDraggable": False,
                "visible": True,
                "spriteInfo": {},
                "indexInLibrary": index,
            }
        )
    return out


def project_to_sb2_dict(project: Project) -> dict:
    root = _sb2_target(project.stage, 0)
    root.update(
        {
            "children": [
                _sb2_target(s, i + 1) for i, s in enumerate(project.sprites)
            ],
            "penLayerID": 0,
            "tempoBPM": 60,
            "videoAlpha": 0.5,
            "info": {},
        }
    )
    return root


# ---------------------------------------------------------------------------
# Archive writing

_ZIP_STAMP = (2020, 1, 1, 0, 0, 0)  # fixed so rebuilt archives are byte-stable


def _write_zip(payload: dict, path: Path) -> None:
    data = json.dumps(payload, ensure_ascii=False).encode("utf-8")
    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
        info = zipfile.ZipInfo("project.json", date_time=_ZIP_STAMP)
        zf.writestr(info, data)


def write_sb3(project: Project, path: str | Path) -> Path:
    path = Path(path)
    _write_zip(project_to_sb3_dict(project), path)
    return path


def write_sb2(project: Project, path: str | Path) -> Path:
    path = Path(path)
    _write_zip(project_to_sb2_dict(project), path)
    return path


def write_archive(project: Project, path: str | Path) -> Path:
    """Write the archive format implied by the filename suffix."""
    path = Path(path)
    if path.suffix.lower() == ".sb2":
        return write_sb2(project, path)
    if path.suffix.lower() == ".sb3":
        return write_sb3(project, path)
    raise ValueError(f"unsupported archive suffix: {path.suffix!r}")


# ---------------------------------------------------------------------------
# Random project generation

_WORDS = (
    "apfel", "ball", "cloud", "drache", "elfe", "flame", "garten", "hero",
    "insel", "jump", "koala", "lampe", "mond", "nebel", "ozean", "pirat",
    "quest", "river", "stern", "tiger", "ufo", "vulkan", "wald", "yeti",
)

_KEYS = ("space", "up arrow", "down arrow", "left arrow", "right arrow", "a", "b")

_NUMBERS = (0, 1, 2, 3, 5, 10, 15, 30, 90, 100, -10, 0.5, 1.5)


class _GenContext:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.variables = rng.sample(_WORDS, rng.randint(1, 3))
        self.messages = rng.sample(_WORDS, rng.randint(1, 2))
        self.costumes = rng.sample(_WORDS, rng.randint(1, 3))
        self.sounds = rng.sample(_WORDS, rng.randint(0, 2))

    def number(self) -> Literal:
        return lit(self.rng.choice(_NUMBERS))

    def text(self) -> Literal:
        words = self.rng.sample(_WORDS, self.rng.randint(1, 3))
        return lit(" ".join(words))


def _random_condition(ctx: _GenContext, depth: int = 0) -> BlockRef:
    rng = ctx.rng
    roll = rng.randrange(6)
    if roll == 0:
        return ref("sensing_mousedown")
    if roll == 1:
        return ref("sensing_keypressed", menu(rng.choice(_KEYS)))
    if roll == 2:
        return ref("operator_gt", ref("data_variable", menu(rng.choice(ctx.variables))), ctx.number())
    if roll == 3:
        return ref("operator_lt", ctx.number(), ctx.number())
    if roll == 4:
        return ref("operator_equals", ref("data_variable", menu(rng.choice(ctx.variables))), ctx.number())
    if depth < 1:
        return ref("operator_not", _random_condition(ctx, depth + 1))
    return ref("sensing_mousedown")


def _random_statement(ctx: _GenContext) -> Block:
    rng = ctx.rng
    choices = (
        lambda: block("motion_movesteps", ctx.number()),
        lambda: block("motion_turnright", ctx.number()),
        lambda: block("motion_gotoxy", ctx.number(), ctx.number()),
        lambda: block("motion_changexby", ctx.number()),
        lambda: block("motion_changeyby", ctx.number()),
        lambda: block("looks_say", ctx.text()),
        lambda: block("looks_show"),
        lambda: block("looks_hide"),
        lambda: block("looks_switchcostumeto", menu(rng.choice(ctx.costumes))),
        lambda: block("looks_setsizeto", ctx.number()),
        lambda: block("control_wait", ctx.number()),
        lambda: block("event_broadcast", menu(rng.choice(ctx.messages))),
        lambda: block("data_setvariableto", menu(rng.choice(ctx.variables)), ctx.number()),
        lambda: block("data_changevariableby", menu(rng.choice(ctx.variables)), ctx.number()),
        lambda: block("pen_penDown"),
        lambda: block("pen_penUp"),
        lambda: block("pen_clear"),
        lambda: block(
            "looks_say",
            BlockRef(block("operator_add", ctx.number(), ctx.number())),
        ),
    )
    if ctx.sounds:
        choices = choices + (lambda: block("sound_play", menu(rng.choice(ctx.sounds))),)
    return rng.choice(choices)()


def _random_body(ctx: _GenContext, depth: int, max_len: int = 4) -> tuple[Block, ...]:
    rng = ctx.rng
    body: list[Block] = []
    for position in range(rng.randint(1, max_len)):
        roll = rng.random()
        if depth > 0 and roll < 0.30:
            kind = rng.randrange(5)
            inner = _random_body(ctx, depth - 1, max_len=3)
            if kind == 0:
                body.append(block("control_if", _random_condition(ctx), subs=(inner,)))
            elif kind == 1:
                body.append(
                    block(
                        "control_if_else",
                        _random_condition(ctx),
                        subs=(inner, _random_body(ctx, depth - 1, max_len=2)),
                    )
                )
            elif kind == 2:
                body.append(block("control_repeat", ctx.number(), subs=(inner,)))
            elif kind == 3:
                body.append(
                    block("control_repeat_until", _random_condition(ctx), subs=(inner,))
                )
            else:
                body.append(block("control_forever", subs=(inner,)))
                break  # forever ends a stack
        elif roll < 0.38:
            body.append(block("control_wait_until", _random_condition(ctx)))
        else:
            body.append(_random_statement(ctx))
    return tuple(body)


def _random_script(ctx: _GenContext) -> Script:
    rng = ctx.rng
    roll = rng.randrange(10)
    if roll < 5:
        hat = block("event_whenflagclicked")
    elif roll < 7:
        hat = block("event_whenkeypressed", menu(rng.choice(_KEYS)))
    elif roll < 8:
        hat = block("event_whenbroadcastreceived", menu(rng.choice(ctx.messages)))
    elif roll < 9:
        hat = block("control_start_as_clone")
    else:
        hat = block("event_whenthisspriteclicked")
    return Script(hat=hat, body=_random_body(ctx, depth=2))


def random_project(project_id: str, rng: random.Random) -> Project:
    """A structurally varied project; sizes are kept modest."""
    ctx = _GenContext(rng)
    sprites = []
    used: set[str] = set()
    for _ in range(rng.randint(1, 3)):
        name = rng.choice([w.title() for w in _WORDS])
        if name in used:
            continue
        used.add(name)
        scripts = tuple(_random_script(ctx) for _ in range(rng.randint(0, 3)))
        orphans: tuple[tuple[Block, ...], ...] = ()
        if rng.random() < 0.2:
            orphans = (tuple(_random_statement(ctx) for _ in range(rng.randint(1, 3))),)
        sprites.append(
            Sprite(
                name=name,
                costumes=tuple(ctx.costumes),
                sounds=tuple(ctx.sounds),
                variables=tuple((v, 0) for v in ctx.variables),
                scripts=scripts,
                orphan_stacks=orphans,
            )
        )
    stage_scripts: tuple[Script, ...] = ()
    if rng.random() < 0.3:
        stage_scripts = (
            Script(
                hat=block("event_whenflagclicked"),
                body=(block("looks_switchbackdropto", menu("scene1")),),
            ),
        )
    stage = Sprite(
        name="Stage",
        is_stage=True,
        costumes=("scene1", "scene2"),
        scripts=stage_scripts,
    )
    return Project(
        project_id=project_id,
        name=project_id,
        dialect=SB3,
        stage=stage,
        sprites=tuple(sprites),
    )


# ---------------------------------------------------------------------------
# Control-structure enumeration (for exhaustive control-flow checks)


def _cs_simple() -> Block:
    return block("motion_movesteps", lit(10))


def _cs_wait_until() -> Block:
    return block("control_wait_until", ref("sensing_mousedown"))


def _cs_wrap(kind: str, *bodies: tuple[Block, ...]) -> Block:
    cond = ref("sensing_mousedown")
    if kind == "if":
        return block("control_if", cond, subs=(bodies[0],))
    if kind == "ifelse":
        return block("control_if_else", cond, subs=(bodies[0], bodies[1]))
    if kind == "repeat":
        return block("control_repeat", lit(3), subs=(bodies[0],))
    if kind == "until":
        return block("control_repeat_until", cond, subs=(bodies[0],))
    if kind == "forever":
        return block("control_forever", subs=(bodies[0],))
    raise ValueError(kind)


def _enum_bodies(depth: int, max_len: int) -> list[tuple[Block, ...]]:
    constructs: list[Block] = [_cs_simple(), _cs_wait_until()]
    if depth > 0:
        inner = _enum_bodies(depth - 1, max_len)
        for body in inner:
            for kind in ("if", "repeat", "until", "forever"):
                constructs.append(_cs_wrap(kind, body))
        for b1 in inner:
            for b2 in inner:
                constructs.append(_cs_wrap("ifelse", b1, b2))
    non_forever = [c for c in constructs if c.opcode != "control_forever"]
    bodies: list[tuple[Block, ...]] = [()]
    for length in range(1, max_len + 1):
        for prefix in itertools.product(non_forever, repeat=length - 1):
            for last in constructs:
                bodies.append(tuple(prefix) + (last,))
    return bodies


def enumerate_control_scripts(depth: int = 1, max_len: int = 2):
    """All script bodies over the control constructs, small sizes first.

    Every construct kind appears at every nesting level up to ``depth``;
    a forever loop can only close a sequence, as in the editor.
    """
    for body in _enum_bodies(depth, max_len):
        yield Script(hat=block("event_whenflagclicked"), body=body)


def random_control_script(rng: random.Random, max_depth: int = 4) -> Script:
    """One random script over the control constructs, nesting to max_depth."""

    def gen_body(depth: int) -> tuple[Block, ...]:
        body: list[Block] = []
        for _ in range(rng.randint(0, 3)):
            roll = rng.randrange(7)
            if roll == 0 or depth == 0:
                body.append(_cs_simple())
            elif roll == 1:
                body.append(_cs_wait_until())
            elif roll == 2:
                body.append(_cs_wrap("if", gen_body(depth - 1)))
            elif roll == 3:
                body.append(_cs_wrap("ifelse", gen_body(depth - 1), gen_body(depth - 1)))
            elif roll == 4:
                body.append(_cs_wrap("repeat", gen_body(depth - 1)))
            elif roll == 5:
                body.append(_cs_wrap("until", gen_body(depth - 1)))
            else:
                body.append(_cs_wrap("forever", gen_body(depth - 1)))
                break
        return tuple(body)

    return Script(hat=block("event_whenflagclicked"), body=gen_body(max_depth))


# ---------------------------------------------------------------------------
# Demo corpus: two groups with planted differences

_STORY_CAST = ("Princess", "Unicorn", "Wizard", "Fairy", "Knight")
_STORY_LINES = (
    "once upon a time in the magic castle",
    "the unicorn dances at the rainbow party",
    "deep in the enchanted forest a fairy sings",
    "the princess finds a magic rainbow crown",
    "a gentle dragon guards the castle gate",
)
_GAME_LINES = (
    "collect every coin to win the level",
    "watch out the ghost hunts the player",
    "reach the goal before the timer ends",
)


def _story_project(project_id: str, rng: random.Random) -> Project:
    cast = rng.sample(_STORY_CAST, 2)
    line_a = rng.choice(_STORY_LINES)
    line_b = rng.choice(_STORY_LINES)
    hero = sprite(
        cast[0],
        script(
            "event_whenflagclicked",
            block("looks_switchcostumeto", menu("gown")),
            block("looks_say", lit(line_a)),
            block("control_wait", lit(rng.randint(1, 3))),
            block("event_broadcast", menu("scene change")),
        ),
        script(
            "event_whenbroadcastreceived",
            block("looks_say", lit("the story of the magic castle ends")),
            hat_inputs=(menu("scene change"),),
        ),
        costumes=("gown", "sparkle"),
        sounds=("chime",),
    )
    friend = sprite(
        cast[1],
        script(
            "event_whenbroadcastreceived",
            block("looks_say", lit(line_b)),
            block("looks_switchcostumeto", menu("sparkle")),
            hat_inputs=(menu("scene change"),),
        ),
        costumes=("sparkle",),
    )
    stage = Sprite(
        name="Stage",
        is_stage=True,
        costumes=("castle hall", "rainbow forest"),
        scripts=(
            Script(
                hat=block("event_whenflagclicked"),
                body=(block("looks_switchbackdropto", menu("castle hall")),),
            ),
        ),
    )
    return Project(
        project_id=project_id,
        name=project_id,
        dialect=SB3,
        stage=stage,
        sprites=(hero, friend),
    )


def _game_project(project_id: str, rng: random.Random) -> Project:
    step = rng.choice((5, 10))
    limit = rng.choice((5, 8, 10))
    var = menu("score")
    lives = menu("lives")
    player = sprite(
        "Player",
        script(
            "event_whenflagclicked",
            block("data_setvariableto", var, lit(0)),
            block("data_setvariableto", lives, lit(3)),
            block(
                "control_forever",
                subs=(
                    (
                        block(
                            "control_if",
                            ref("sensing_touchingobject", menu("Ghost")),
                            subs=(
                                (
                                    block("data_changevariableby", lives, lit(-1)),
                                    block(
                                        "control_if",
                                        ref(
                                            "operator_lt",
                                            ref("data_variable", lives),
                                            lit(1),
                                        ),
                                        subs=((block("event_broadcast", menu("game over")),),),
                                    ),
                                ),
                            ),
                        ),
                        block(
                            "control_if_else",
                            ref(
                                "operator_gt",
                                ref("data_variable", var),
                                lit(limit),
                            ),
                            subs=(
                                (block("looks_say", lit("you win the level")),),
                                (block("data_changevariableby", var, lit(1)),),
                            ),
                        ),
                    ),
                ),
            ),
        ),
        script(
            "event_whenkeypressed",
            block("motion_changexby", lit(step)),
            hat_inputs=(menu("right arrow"),),
        ),
        script(
            "event_whenkeypressed",
            block("motion_changexby", lit(-step)),
            hat_inputs=(menu("left arrow"),),
        ),
        script(
            "event_whenkeypressed",
            block("motion_changeyby", lit(step)),
            hat_inputs=(menu("up arrow"),),
        ),
        script(
            "event_whenkeypressed",
            block("motion_changeyby", lit(-step)),
            hat_inputs=(menu("down arrow"),),
        ),
        script(
            "event_whenbroadcastreceived",
            block("looks_say", lit(rng.choice(_GAME_LINES))),
            block("control_stop", menu("all")),
            hat_inputs=(menu("game over"),),
        ),
        costumes=("player run", "player jump"),
        variables=(("score", 0), ("lives", 3)),
    )
    ghost = sprite(
        "Ghost",
        script(
            "event_whenflagclicked",
            block(
                "control_forever",
                subs=(
                    (
                        block("control_wait", lit(1)),
                        block("control_create_clone_of", menu("_myself_")),
                    ),
                ),
            ),
        ),
        script(
            "control_start_as_clone",
            block("motion_gotoxy", lit(rng.randint(-200, 200)), lit(100)),
            block(
                "control_repeat_until",
                ref("sensing_touchingobject", menu("_edge_")),
                subs=((block("motion_changeyby", lit(-step)),),),
            ),
            block("control_delete_this_clone"),
        ),
        costumes=("ghost fly",),
    )
    stage = Sprite(
        name="Stage",
        is_stage=True,
        costumes=("arena", "game over screen"),
        scripts=(
            Script(
                hat=block("event_whenbroadcastreceived", (menu("game over"))),
                body=(block("looks_switchbackdropto", menu("game over screen")),),
            ),
        ),
    )
    return Project(
        project_id=project_id,
        name=project_id,
        dialect=SB3,
        stage=stage,
        sprites=(player, ghost),
    )


def build_demo_corpus(directory: str | Path, seed: int = 7) -> list[Path]:
    """Write 20 archives (10 per group) plus metadata.csv.

    Planted contrasts, every game project strictly above every story
    project: conditional blocks, interprocedural complexity, operand reuse
    (Halstead difficulty).  Both archive dialects appear in both groups.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    paths: list[Path] = []
    rows: list[tuple[str, str, int]] = []
    for i in range(10):
        project_id = f"story{i:02d}"
        project = _story_project(project_id, rng)
        suffix = ".sb2" if i % 2 else ".sb3"
        paths.append(write_archive(project, directory / f"{project_id}{suffix}"))
        rows.append((project_id, "story", 8 + i % 3))
    for i in range(10):
        project_id = f"game{i:02d}"
        project = _game_project(project_id, rng)
        suffix = ".sb2" if i % 2 else ".sb3"
        paths.append(write_archive(project, directory / f"{project_id}{suffix}"))
        rows.append((project_id, "game", 9 + i % 4))
    lines = ["project_id,group,age"]
    lines.extend(f"{pid},{group},{age}" for pid, group, age in rows)
    (directory / "metadata.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return paths
