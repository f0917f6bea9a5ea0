"""Text and DOT dumps of tableaux, and the JSON result record.

JSON record fields:

    status        "closed" | "open" | "exhausted" | "unsupported"
    stages        number of stages run
    labels        labels on the reported branch (open) or in the whole tableau
    formula       the input, rendered; ``sat`` inputs are joined with "; "
    logic         frame condition name
    reason        present for exhausted/unsupported
    countermodel  present for open: {"worlds", "R", "S", "V"}
"""

from __future__ import annotations

import json

from .semantics import model_to_json
from .tableau import ProverResult, Status, Tableau

CLOSED_MARK = "✗"


def render_text(tab: Tableau) -> str:
    lines = []
    # (node, prefix of its own line, prefix for what follows it)
    stack = [(tab.root, "", "")]
    while stack:
        node, first, rest = stack.pop()
        lines.append(f"{first}{node.item} [{node.mark.value}]")
        if not node.children:
            if node.state is not None and node.state.closed:
                lines.append(f"{rest}{CLOSED_MARK}")
        elif len(node.children) == 1:
            stack.append((node.children[0], rest, rest))
        else:
            left, right = node.children
            stack.append((right, rest + "└── ", rest + "    "))
            stack.append((left, rest + "├── ", rest + "│   "))
    return "\n".join(lines) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def render_dot(tab: Tableau) -> str:
    out = ["digraph tableau {", '  node [shape=box, fontname="monospace"];']
    for node in tab.nodes():
        label = _dot_escape(f"{node.item}") + "\\n[" + node.mark.value + "]"
        out.append(f'  n{node.nid} [label="{label}"];')
        for child in node.children:
            out.append(f"  n{node.nid} -> n{child.nid};")
        if not node.children and node.state is not None and node.state.closed:
            out.append(f'  x{node.nid} [label="{CLOSED_MARK}", shape=plaintext];')
            out.append(f"  n{node.nid} -> x{node.nid};")
    out.append("}")
    return "\n".join(out) + "\n"


def render_tableau(tab: Tableau, fmt: str = "text") -> str:
    if fmt == "dot":
        return render_dot(tab)
    return render_text(tab)


def result_record(result: ProverResult, formula: str, logic: str) -> dict:
    record = {
        "status": result.status.value,
        "stages": result.stages,
        "labels": result.labels,
        "formula": formula,
        "logic": logic,
    }
    if result.reason:
        record["reason"] = result.reason
    if result.status is Status.OPEN and result.model is not None:
        record["countermodel"] = model_to_json(result.model)
    return record


def result_json(result: ProverResult, formula: str, logic: str, **extra) -> str:
    record = result_record(result, formula, logic)
    record.update(extra)
    return json.dumps(record, indent=2, ensure_ascii=False) + "\n"
