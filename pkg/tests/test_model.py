"""AST model: invariants, traversal order, dict/JSON round-trips."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from scratchstats.model import (
    CATEGORIES,
    HAT_OPCODES,
    Block,
    BlockRef,
    Literal,
    MenuSelection,
    ModelError,
    Project,
    Script,
    Sprite,
    block_category,
    iter_block_tree,
    iter_project_blocks,
    load_opcode_table,
    normalize_opcode,
    project_from_dict,
    project_from_json,
    project_to_dict,
    project_to_json,
    script_block_count,
)


def _sample_project() -> Project:
    inner = Block("motion_movesteps", (Literal(10),))
    reporter = BlockRef(Block("operator_add", (Literal(1), Literal(2.5))))
    say = Block("looks_say", (reporter,))
    loop = Block("control_repeat", (Literal(3),), ((inner, say),))
    script = Script(Block("event_whenflagclicked"), (loop,))
    sprite = Sprite(
        name="Hero",
        costumes=("suit", "cape"),
        sounds=("jump",),
        variables=(("score", 0), ("speed", 1.5)),
        lists=("bag",),
        scripts=(script,),
        orphan_stacks=((Block("looks_hide"),),),
    )
    stage = Sprite(name="Stage", is_stage=True, costumes=("sky",))
    return Project("p1", "p1", "sb3", stage, (sprite,))


def test_project_validation():
    stage = Sprite(name="Stage", is_stage=True)
    with pytest.raises(ModelError):
        Project("p", "p", "sb9", stage)
    with pytest.raises(ModelError):
        Project("p", "p", "sb3", Sprite(name="NotStage"))
    dup = Sprite(name="Twin")
    with pytest.raises(ModelError):
        Project("p", "p", "sb3", stage, (dup, dup))


def test_script_requires_hat():
    with pytest.raises(ModelError):
        Script(Block("motion_movesteps"))
    for opcode in sorted(HAT_OPCODES):
        Script(Block(opcode))  # every listed hat is accepted


def test_targets_order():
    project = _sample_project()
    assert project.targets()[0] is project.stage
    assert project.targets()[1:] == project.sprites


def test_iter_block_tree_order():
    """Parent first, then input reporters, then substacks."""
    project = _sample_project()
    opcodes = [b.opcode for b in iter_project_blocks(project)]
    assert opcodes == [
        "event_whenflagclicked",
        "control_repeat",
        "motion_movesteps",
        "looks_say",
        "operator_add",
        "looks_hide",
    ]


def test_script_block_count_includes_reporters():
    project = _sample_project()
    assert script_block_count(project.sprites[0].scripts[0]) == 5


def test_round_trip_dict_and_json():
    project = _sample_project()
    assert project_from_dict(project_to_dict(project)) == project
    assert project_from_json(project_to_json(project)) == project


def test_round_trip_preserves_literal_types():
    block = Block("looks_say", (Literal("10"),))  # string that looks numeric
    # the dict round-trip must not silently fold it into an int
    script = Script(Block("event_whenflagclicked"), (block,))
    stage = Sprite(name="Stage", is_stage=True)
    project = Project("p", "p", "sb3", stage, (Sprite("S", scripts=(script,)),))
    back = project_from_dict(project_to_dict(project))
    value = back.sprites[0].scripts[0].body[0].inputs[0].value
    assert value == "10" and isinstance(value, str)


# --- opcode table -------------------------------------------------------------


def test_opcode_table_total_and_categorized():
    table = load_opcode_table()
    assert table.translation
    for (dialect, _raw), canonical in table.translation.items():
        assert dialect in ("sb2", "sb3")
        assert block_category(canonical) in CATEGORIES


def test_normalize_opcode_known_and_unknown():
    assert normalize_opcode("sb2", "whenGreenFlag") == "event_whenflagclicked"
    assert normalize_opcode("sb3", "motion_movesteps") == "motion_movesteps"
    assert normalize_opcode("sb2", "noSuchBlock") == "unknown:noSuchBlock"


def test_block_category_prefixes():
    assert block_category("motion_movesteps") == "motion"
    assert block_category("pen_penDown") == "pen"
    assert block_category("procedures_call") == "custom"
    assert block_category("argument_reporter_string_number") == "custom"
    assert block_category("unknown:mystery") == "custom"


def test_every_hat_is_event_control_or_custom():
    for opcode in HAT_OPCODES:
        assert block_category(opcode) in ("event", "control", "custom")


# --- property: random ASTs survive the round-trip ------------------------------

_literals = st.one_of(
    st.integers(-1000, 1000),
    st.floats(allow_nan=False, allow_infinity=False, width=32),
    st.text(max_size=8),
    st.booleans(),
)


def _blocks(depth: int) -> st.SearchStrategy:
    leaf = st.builds(
        Block,
        opcode=st.sampled_from(["motion_movesteps", "looks_say", "looks_hide"]),
        inputs=st.tuples(st.builds(Literal, _literals)),
    )
    if depth == 0:
        return leaf
    return st.one_of(
        leaf,
        st.builds(
            Block,
            opcode=st.just("control_repeat"),
            inputs=st.tuples(st.builds(Literal, st.integers(0, 10))),
            substacks=st.tuples(st.lists(_blocks(depth - 1), max_size=2).map(tuple)),
        ),
        st.builds(
            Block,
            opcode=st.just("operator_add"),
            inputs=st.tuples(
                st.builds(Literal, _literals),
                st.builds(BlockRef, _blocks(depth - 1)),
            ),
        ),
    )


@given(st.lists(_blocks(2), max_size=4).map(tuple))
def test_round_trip_random_bodies(body):
    script = Script(Block("event_whenflagclicked"), body)
    stage = Sprite(name="Stage", is_stage=True)
    project = Project("p", "p", "sb3", stage, (Sprite("S", scripts=(script,)),))
    assert project_from_dict(project_to_dict(project)) == project
    assert project_from_json(project_to_json(project)) == project


@given(st.text(max_size=12))
def test_menu_selection_round_trip(value):
    block = Block("looks_switchcostumeto", (MenuSelection(value),))
    script = Script(Block("event_whenflagclicked"), (block,))
    stage = Sprite(name="Stage", is_stage=True)
    project = Project("p", "p", "sb2", stage, (Sprite("S", scripts=(script,)),))
    back = project_from_dict(project_to_dict(project))
    assert isinstance(back.sprites[0].scripts[0].body[0].inputs[0], MenuSelection)
    assert back == project
