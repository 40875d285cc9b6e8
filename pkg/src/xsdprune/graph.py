"""DOT rendering of a schema set's relation graph."""
from __future__ import annotations

from .model import Kind, SchemaSet

_SHAPES = {
    Kind.TYPE: "box",
    Kind.ELEMENT: "ellipse",
    Kind.ATTRIBUTE: "note",
    Kind.MODEL_GROUP: "component",
    Kind.ATTRIBUTE_GROUP: "folder",
}


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(s: SchemaSet, name: str = "schema") -> str:
    """One node per component, one labelled edge per relation pair, sorted."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;"]
    for c in sorted(s.all_components(), key=lambda c: c.label):
        lines.append(f"  {_quote(c.label)} [label={_quote(str(c))}, shape={_SHAPES[c.kind]}];")
    edges = sorted((x.label, y.label, rel.value) for rel, x, y in s.all_pairs())
    for x, y, rel in edges:
        lines.append(f"  {_quote(x)} -> {_quote(y)} [label={_quote(rel)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
