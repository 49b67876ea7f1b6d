"""Control-flow graphs over scripts and whole projects.

Script graphs are directed multigraphs with synthetic entry/exit nodes.
Every decision block (both branching and looping) leaves exactly two
edges, every other node exactly one, so cyclomatic complexity E - N + 2
equals the number of decision blocks plus one.  The infinite loop keeps a
synthetic exit edge for exactly this reason; it never runs at runtime but
preserves the complexity identity and keeps every node connected.

The interprocedural graph is the union of all script graphs plus a
virtual program-start node wired to user-triggered hats, broadcast edges
from send sites to matching receiver entries (case-insensitive), and
clone-creation edges to clone-start entries.  Orphan stacks stay out of
it: dead code does not alter interprocedural complexity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from .model import (
    Block,
    Literal,
    MenuSelection,
    Project,
    Script,
)

DECISION_OPCODES = frozenset(
    {
        "control_if",
        "control_if_else",
        "control_repeat",
        "control_repeat_until",
        "control_wait_until",
        "control_forever",
    }
)

LOOP_OPCODES = frozenset({"control_repeat", "control_repeat_until", "control_forever"})

# Hats that fire from outside the program (user or environment), reached
# from the virtual start node.  Broadcast receivers, clone starts and
# custom block definitions are only reached through cross edges.
USER_TRIGGERED_HATS = frozenset(
    {
        "event_whenflagclicked",
        "event_whenkeypressed",
        "event_whenthisspriteclicked",
        "event_whenstageclicked",
        "event_whenbackdropswitchesto",
        "event_whengreaterthan",
    }
)

BROADCAST_SEND_OPCODES = frozenset({"event_broadcast", "event_broadcastandwait"})

ENTRY = "entry"
EXIT = "exit"
PROGRAM_START = "program-start"


@dataclass(frozen=True)
class Cfg:
    """A directed multigraph; node ids index into ``labels``."""

    labels: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    entry: int
    exit: int

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class InterproceduralCfg:
    labels: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    program_start: int
    script_entries: tuple[int, ...]

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


class _Builder:
    def __init__(self) -> None:
        self.labels: list[str] = []
        self.edges: list[tuple[int, int]] = []

    def add_node(self, label: str) -> int:
        self.labels.append(label)
        return len(self.labels) - 1

    def add_edge(self, src: int, dst: int) -> None:
        self.edges.append((src, dst))

    def wire_stack(self, blocks: tuple[Block, ...], preds: list[int]) -> list[int]:
        """Add a stack of statement blocks; return the dangling exits."""
        for block in blocks:
            node = self.add_node(block.opcode)
            for p in preds:
                self.add_edge(p, node)
            op = block.opcode
            if op == "control_if":
                sub = block.substacks[0] if block.substacks else ()
                preds = self.wire_stack(sub, [node]) + [node]
            elif op == "control_if_else":
                sub1 = block.substacks[0] if len(block.substacks) > 0 else ()
                sub2 = block.substacks[1] if len(block.substacks) > 1 else ()
                preds = self.wire_stack(sub1, [node]) + self.wire_stack(sub2, [node])
            elif op in LOOP_OPCODES:
                sub = block.substacks[0] if block.substacks else ()
                for e in self.wire_stack(sub, [node]):
                    self.add_edge(e, node)  # back edge
                preds = [node]
            elif op == "control_wait_until":
                self.add_edge(node, node)  # spin until the condition flips
                preds = [node]
            else:
                preds = [node]
        return preds


def build_script_cfg(script: Script) -> Cfg:
    """Graph for one script; statement blocks only, reporters excluded."""
    b = _Builder()
    entry = b.add_node(ENTRY)
    hat = b.add_node(script.hat.opcode)
    b.add_edge(entry, hat)
    exits = b.wire_stack(script.body, [hat])
    exit_node = b.add_node(EXIT)
    for e in exits:
        b.add_edge(e, exit_node)
    return Cfg(labels=tuple(b.labels), edges=tuple(b.edges), entry=entry, exit=exit_node)


def cyclomatic_complexity(cfg: Cfg) -> int:
    return cfg.edge_count - cfg.node_count + 2


def count_decisions(script: Script) -> int:
    """Independent count of decision blocks, for cross-checking CC."""
    from .model import iter_script_blocks

    return sum(1 for b in iter_script_blocks(script) if b.opcode in DECISION_OPCODES)


# ---------------------------------------------------------------------------
# Interprocedural graph


def _static_message(block: Block) -> str | None:
    """Broadcast message when statically known, folded for matching."""
    if not block.inputs:
        return None
    first = block.inputs[0]
    if isinstance(first, MenuSelection):
        return str(first.value).casefold()
    if isinstance(first, Literal):
        return str(first.value).casefold()
    return None  # computed at runtime, no static edge


def _statement_nodes(script: Script, offset: int) -> Iterator[tuple[int, Block]]:
    """(node id, block) pairs matching build_script_cfg's creation order."""
    counter = offset + 1  # offset is the entry node; the hat comes next

    def walk(blocks: tuple[Block, ...]) -> Iterator[tuple[int, Block]]:
        nonlocal counter
        for block in blocks:
            yield counter, block
            counter += 1
            for stack in block.substacks:
                yield from walk(stack)

    yield counter, script.hat
    counter += 1
    yield from walk(script.body)


def build_interprocedural_cfg(project: Project) -> InterproceduralCfg:
    b = _Builder()
    start = b.add_node(PROGRAM_START)
    script_entries: list[int] = []
    send_sites: list[tuple[int, str]] = []
    clone_sites: list[int] = []
    receiver_entries: list[tuple[int, str]] = []
    clone_entries: list[int] = []

    for sprite in project.targets():
        for script in sprite.scripts:
            sub = build_script_cfg(script)
            offset = len(b.labels)
            b.labels.extend(sub.labels)
            for u, v in sub.edges:
                b.add_edge(u + offset, v + offset)
            entry = sub.entry + offset
            script_entries.append(entry)

            hat_op = script.hat.opcode
            if hat_op in USER_TRIGGERED_HATS:
                b.add_edge(start, entry)
            elif hat_op == "event_whenbroadcastreceived":
                message = _static_message(script.hat)
                if message is not None:
                    receiver_entries.append((entry, message))
            elif hat_op == "control_start_as_clone":
                clone_entries.append(entry)

            for node_id, block in _statement_nodes(script, offset):
                if block.opcode in BROADCAST_SEND_OPCODES:
                    message = _static_message(block)
                    if message is not None:
                        send_sites.append((node_id, message))
                elif block.opcode == "control_create_clone_of":
                    clone_sites.append(node_id)

    for node_id, message in send_sites:
        for entry, received in receiver_entries:
            if received == message:
                b.add_edge(node_id, entry)
    for node_id in clone_sites:
        for entry in clone_entries:
            b.add_edge(node_id, entry)

    return InterproceduralCfg(
        labels=tuple(b.labels),
        edges=tuple(b.edges),
        program_start=start,
        script_entries=tuple(script_entries),
    )


def connected_components(graph: InterproceduralCfg) -> int:
    """Weakly connected components, virtual start node included."""
    parent = list(range(graph.node_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in graph.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(i) for i in range(graph.node_count)})


def interprocedural_complexity(project: Project) -> int:
    """E - N + 2P over the interprocedural graph; 0 for a codeless project.

    Without the zero convention a project with no scripts would score 1
    from the bare start node.
    """
    if not any(sprite.scripts for sprite in project.targets()):
        return 0
    graph = build_interprocedural_cfg(project)
    p = connected_components(graph)
    return graph.edge_count - graph.node_count + 2 * p


def to_dot(graph: Cfg | InterproceduralCfg, title: str = "cfg") -> str:
    """Render a graph in DOT form for external viewers."""
    lines = [f"digraph {json.dumps(title)} {{"]
    for i, label in enumerate(graph.labels):
        lines.append(f"  n{i} [label={json.dumps(label)}];")
    for u, v in graph.edges:
        lines.append(f"  n{u} -> n{v};")
    lines.append("}")
    return "\n".join(lines)
