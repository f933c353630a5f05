"""DOT, ASCII and matplotlib renderings of text circuits.

All renderers work from the canonical document, so equal circuits render to
identical output whatever order their elements were listed in.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

from .circuit import TextCircuit, canonical_document


def _describe(el: dict) -> str:
    if "contents" in el:
        return f"{el['label']}[{_describe(el['contents'])}]"
    if el["kind"] == "conjunction":
        left = "; ".join(_describe(x) for x in el["left"]["elements"])
        right = "; ".join(_describe(x) for x in el["right"]["elements"])
        return f"({left}) {el['label']} ({right})"
    return el["label"]


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(circuit: TextCircuit) -> str:
    """Graphviz source: one column per wire, gates as nodes, boxes as clusters.

    Every node that sits on wires carries an ``arity`` attribute with the
    number of wires it touches.
    """
    doc = canonical_document(circuit)
    lines = ["digraph circuit {", "  rankdir=TB;", "  node [shape=box, fontname=Helvetica];"]
    if not doc["wires"]:
        lines.append("}")
        return "\n".join(lines) + "\n"
    for i, noun in doc["wires"]:
        lines.append(f"  w{i}_in [label={_quote(noun)}, shape=plaintext, group=w{i}];")
    trail: dict[int, str] = {i: f"w{i}_in" for i, _ in doc["wires"]}
    edges: list[str] = []
    counter = [0]

    def fresh() -> str:
        counter[0] += 1
        return f"e{counter[0]}"

    def thread(node: str, wires) -> None:
        for w in wires:
            edges.append(f"  {trail[w]} -> {node} [label=\"{w}\"];")
            trail[w] = node

    def place(el: dict, indent: str) -> None:
        if "contents" in el:
            name = fresh()
            lines.append(f"{indent}subgraph cluster_{name} {{")
            lines.append(f"{indent}  label={_quote(el['kind'] + ': ' + el['label'])};")
            own = [w for w in el["wires"] if w not in el["contents"]["wires"]]
            if own:
                port = f"{name}_port"
                lines.append(f"{indent}  {port} [label={_quote(el['label'])}, shape=point, arity={len(own)}];")
                thread(port, own)
            place(el["contents"], indent + "  ")
            lines.append(f"{indent}}}")
        elif el["kind"] == "conjunction":
            name = fresh()
            lines.append(f"{indent}subgraph cluster_{name} {{")
            lines.append(f"{indent}  label={_quote('conjunction: ' + el['label'])};")
            for side in ("left", "right"):
                lines.append(f"{indent}  subgraph cluster_{name}_{side} {{")
                lines.append(f"{indent}    label={side};")
                for sub in el[side]["elements"]:
                    place(sub, indent + "    ")
                lines.append(f"{indent}  }}")
            lines.append(f"{indent}}}")
        else:
            name = fresh()
            lines.append(f"{indent}{name} [label={_quote(el['label'])}, kind={el['kind']}, arity={len(el['wires'])}];")
            thread(name, el["wires"])

    for el in doc["elements"]:
        place(el, "  ")
    for i, _ in doc["wires"]:
        lines.append(f"  w{i}_out [label=\"\", shape=none, group=w{i}];")
        edges.append(f"  {trail[i]} -> w{i}_out [label=\"{i}\"];")
    lines += edges
    lines.append("}")
    return "\n".join(lines) + "\n"


def _use_color(stream=None) -> bool:
    mode = os.environ.get("TEXTCIRC_COLOR", "auto").lower()
    if mode == "always":
        return True
    if mode == "never":
        return False
    stream = stream if stream is not None else sys.stdout
    return hasattr(stream, "isatty") and stream.isatty()


def _touched(el: dict) -> set[int]:
    return set(el["wires"])


def render_ascii(circuit: TextCircuit, color: bool | None = None) -> str:
    """Grid with one column per wire and one row per top-level element.

    ``o`` marks a wire the element acts on, ``|`` a wire passing by, ``-``
    joins the touched wires.  ``color=None`` follows ``TEXTCIRC_COLOR``.
    """
    doc = canonical_document(circuit)
    if not doc["wires"]:
        return ""
    if color is None:
        color = _use_color()
    mark = "\x1b[1;36mo\x1b[0m" if color else "o"
    width = max(len(n) for _, n in doc["wires"]) + 2
    header = "".join(n.ljust(width) for _, n in doc["wires"]).rstrip()
    rows = [header]
    for el in doc["elements"]:
        touched = _touched(el)
        lo, hi = min(touched), max(touched)
        cells = []
        for i, _ in doc["wires"]:
            sym = mark if i in touched else "|"
            fill = "-" if lo <= i < hi else " "
            cells.append(sym + fill * (width - 1))
        rows.append("".join(cells) + f" {el['kind']}: {_describe(el)}")
    return "\n".join(r.rstrip() for r in rows) + "\n"


def render_figure(circuit: TextCircuit, path: str | Path, title: str | None = None) -> Path:
    """Draw the circuit with matplotlib and save it to ``path`` (format from the suffix)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Rectangle

    doc = canonical_document(circuit)
    n_wires = max(len(doc["wires"]), 1)
    fig, ax = plt.subplots(figsize=(1.6 * n_wires + 1.5, 0.9 * max(len(doc["elements"]), 1) + 1.2))

    def draw(el: dict, x0: float, x1: float, top: float, bottom: float, depth: int) -> None:
        face = ("#dbe9f6", "white", "#eef4ea")[depth % 3]
        ax.add_patch(Rectangle((x0, bottom), x1 - x0, top - bottom,
                               facecolor=face, edgecolor="0.1", lw=1.0, zorder=2 + depth))
        if "contents" in el:
            ax.text(x0 + 0.04, top - 0.03, el["label"], fontsize=7, va="top", ha="left", zorder=20)
            inner = el["contents"]
            lo, hi = min(inner["wires"]), max(inner["wires"])
            draw(inner, max(x0 + 0.08, lo - 0.3 + 0.08 * depth), min(x1 - 0.08, hi + 0.3 - 0.08 * depth),
                 top - 0.2, bottom + 0.06, depth + 1)
        else:
            ax.text((x0 + x1) / 2, (top + bottom) / 2, el["label"], fontsize=8,
                    ha="center", va="center", zorder=20)

    def nesting(el: dict) -> int:
        return 1 + nesting(el["contents"]) if "contents" in el else 0

    row_tops = []
    y = 0.0
    for el in doc["elements"]:
        h = 0.5 + 0.26 * (nesting(el) if el["kind"] != "conjunction" else 0)
        row_tops.append((y - 0.15, y - 0.15 - h))
        y -= h + 0.3
    for i, noun in doc["wires"]:
        ax.plot([i, i], [0.3, y], color="0.3", lw=1.2, zorder=1)
        ax.text(i, 0.4, noun, ha="center", va="bottom", fontsize=10)
    for (top, bottom), el in zip(row_tops, doc["elements"]):
        lo, hi = min(el["wires"]), max(el["wires"])
        if el["kind"] == "conjunction":
            ax.add_patch(Rectangle((lo - 0.4, bottom), hi - lo + 0.8, top - bottom, facecolor="#f6e7db",
                                   edgecolor="0.1", lw=1.0, zorder=2))
            ax.text((lo + hi) / 2, (top + bottom) / 2, _describe(el), ha="center", va="center",
                    fontsize=7, zorder=20)
        else:
            draw(el, lo - 0.35, hi + 0.35, top, bottom, 0)
    ax.set_xlim(-0.8, n_wires - 0.2)
    ax.set_ylim(y - 0.2, 0.9)
    ax.axis("off")
    if title:
        ax.set_title(title, fontsize=11)
    out = Path(path)
    fig.savefig(out, bbox_inches="tight", dpi=120)
    plt.close(fig)
    return out
