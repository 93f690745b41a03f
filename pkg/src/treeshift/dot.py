"""Graphviz DOT rendering of a (truncated) weighted shift."""

from __future__ import annotations

from pathlib import Path

from .classify import formal_normality
from .errors import WindowError
from .shift import WeightedShift
from .tree import Shape, TreeProfile, Window, path_shape, truncate


def _witness(shift: WeightedShift):
    verdict = formal_normality(shift)
    if verdict.is_normal:
        return verdict.path
    if isinstance(shift.tree, TreeProfile):
        shape = path_shape(shift.tree)
        if shape.kind != Shape.NOT_A_PATH:
            return shape.enumeration
    return None


def to_dot(shift: WeightedShift, window: Window | None = None) -> str:
    """DOT source: edges labelled by weight modulus, zero weights dashed, witness path in red."""
    if shift.is_profile:
        tree = shift.tree
        if window is None or (window == Window(0, 0) and (tree.stem or tree.rays)):
            raise WindowError("profiles need a nonempty --window to be drawn")
    finite, boundary = truncate(shift.tree, window or Window())
    path = _witness(shift)
    lines = ["digraph shift {", "  rankdir=LR;", "  node [shape=circle];"]
    for v in finite.vertices:
        attrs = [f'label="{v}"']
        if v in boundary:
            attrs.append("style=dotted")
        if path is not None and v in path:
            attrs.append("color=red")
        lines.append(f'  "{v}" [{", ".join(attrs)}];')
    for p, v in finite.edges():
        x = shift.weight(v)
        attrs = [f'label="{abs(x):.6g}"']
        if x == 0:
            attrs.append("style=dashed")
        if path is not None and v in path and p in path:
            attrs.append("color=red, penwidth=2")
        lines.append(f'  "{p}" -> "{v}" [{", ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_dot(shift: WeightedShift, path, window: Window | None = None) -> Path:
    path = Path(path)
    path.write_text(to_dot(shift, window))
    return path
