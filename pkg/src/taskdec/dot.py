"""Graphviz export with a stable, byte-reproducible layout."""
from __future__ import annotations

from .automata import EPSILON, Automaton


def _quote(name: str) -> str:
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def dot_export(a: Automaton, name: str = "automaton", rankdir: str = "LR") -> str:
    """DOT text for the automaton.

    Initial states get an arrow from an invisible point, hidden moves show as
    dashed edges, and everything is emitted in a fixed order so the same
    automaton always yields the same bytes.
    """
    lines = [f"digraph {_quote(name)} {{"]
    lines.append(f"  rankdir={rankdir};")
    lines.append("  node [shape=circle];")
    for i, q in enumerate(sorted(a.initials, key=a.sort_key)):
        lines.append(f"  __start{i} [shape=point, style=invis];")
    for q in a.states:
        lines.append(f"  {_quote(q)};")
    for i, q in enumerate(sorted(a.initials, key=a.sort_key)):
        lines.append(f"  __start{i} -> {_quote(q)};")
    for src, label, dst in sorted(
        a.transitions, key=lambda t: (a.sort_key(t[0]), t[1], a.sort_key(t[2]))
    ):
        if label == EPSILON:
            lines.append(
                f"  {_quote(src)} -> {_quote(dst)} [label=\"ε\", style=dashed];"
            )
        else:
            lines.append(f"  {_quote(src)} -> {_quote(dst)} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
