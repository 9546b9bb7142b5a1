"""Process-model fragments built from split sentences.

Condition clauses become diamond gateway nodes; a dashed edge leads from a
gateway to its resultant. Solid edges chain the main flow, which passes
through Action resultants and bypasses Consequence resultants.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable

from .model import Label, SentenceClass, SplitResult

STEP = "step"
CONDITION = "condition"
SOLID = "solid"
DASHED = "dashed"


@dataclass(frozen=True)
class ProcessNode:
    id: str
    kind: str
    text: str
    # a Consequence branch: the flow does not continue from it
    terminal: bool = False


@dataclass(frozen=True)
class ProcessEdge:
    source: str
    target: str
    style: str


@dataclass(frozen=True)
class ProcessGraph:
    nodes: tuple[ProcessNode, ...] = ()
    edges: tuple[ProcessEdge, ...] = ()

    def node(self, node_id: str) -> ProcessNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def check(self) -> list[str]:
        """Problems with referential integrity or edge styles; empty when valid."""
        problems = []
        kinds = {n.id: n.kind for n in self.nodes}
        if len(kinds) != len(self.nodes):
            problems.append("duplicate node ids")
        for e in self.edges:
            for end in (e.source, e.target):
                if end not in kinds:
                    problems.append(f"edge {e.source}->{e.target}: unknown node {end}")
            if e.style == DASHED and kinds.get(e.source) != CONDITION:
                problems.append(f"dashed edge {e.source}->{e.target} does not start at a condition")
            if e.style not in (SOLID, DASHED):
                problems.append(f"edge {e.source}->{e.target}: unknown style {e.style!r}")
        return problems


def build_graph(results: Iterable[tuple[str, SplitResult]]) -> ProcessGraph:
    nodes: list[ProcessNode] = []
    edges: list[ProcessEdge] = []
    tail = None

    def link(node_id):
        if tail is not None:
            edges.append(ProcessEdge(tail, node_id, SOLID))

    for i, (text, res) in enumerate(results):
        if res.sentence_class is SentenceClass.NC:
            node = ProcessNode(f"s{i}.step", STEP, text)
            nodes.append(node)
            link(node.id)
            tail = node.id
            continue
        cond = ProcessNode(f"s{i}.condition", CONDITION, res.condition.text_of(text))
        nodes.append(cond)
        link(cond.id)
        tail = cond.id
        if res.resultant is None:
            continue
        is_action = res.resultant.label is Label.ACTION
        step = ProcessNode(f"s{i}.resultant", STEP, res.resultant.text_of(text), terminal=not is_action)
        nodes.append(step)
        edges.append(ProcessEdge(cond.id, step.id, DASHED))
        if is_action:
            tail = step.id
    return ProcessGraph(tuple(nodes), tuple(edges))


_ROLE_ORDER = {"step": 0, "condition": 0, "resultant": 1}
_ID_RE = re.compile(r"s(\d+)\.(\w+)")


def _id_key(node_id: str):
    m = _ID_RE.fullmatch(node_id)
    if m is None:
        return (1, node_id, 0, "")
    return (0, "", int(m.group(1)), _ROLE_ORDER.get(m.group(2), 2), m.group(2))


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def export_dot(g: ProcessGraph, name: str = "process") -> str:
    lines = [f'digraph "{_dot_escape(name)}" {{', "  rankdir=TB;"]
    for n in sorted(g.nodes, key=lambda n: _id_key(n.id)):
        shape = "diamond" if n.kind == CONDITION else "box"
        extra = ", peripheries=2" if n.terminal else ""
        lines.append(f'  "{_dot_escape(n.id)}" [shape={shape}, label="{_dot_escape(n.text)}"{extra}];')
    for e in g.edges:
        style = ", style=dashed" if e.style == DASHED else ""
        lines.append(f'  "{_dot_escape(e.source)}" -> "{_dot_escape(e.target)}" [arrowhead=normal{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dict(g: ProcessGraph) -> dict:
    return {
        "nodes": [{"id": n.id, "kind": n.kind, "text": n.text, "terminal": n.terminal} for n in g.nodes],
        "edges": [{"from": e.source, "to": e.target, "style": e.style} for e in g.edges],
    }


def export_json(g: ProcessGraph) -> str:
    return json.dumps(graph_to_dict(g), ensure_ascii=False, indent=2)


def parse_json(doc: str) -> ProcessGraph:
    data = json.loads(doc)
    nodes = tuple(ProcessNode(n["id"], n["kind"], n["text"], bool(n.get("terminal", False)))
                  for n in data["nodes"])
    edges = tuple(ProcessEdge(e["from"], e["to"], e["style"]) for e in data["edges"])
    return ProcessGraph(nodes, edges)
