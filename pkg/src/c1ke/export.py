"""JSON, DOT and plain-text renderings of proof results."""

from __future__ import annotations

import json

from .formula import print_formula, print_sequent
from .tableau import OPEN_END, UNEXPLORED, Closure, ProofResult, Segment, Split, extract_countermodel

SCHEMA_VERSION = 1


def _node_dict(node, style):
    d = {"kind": "formula", "id": node.id, "sign": node.sf.sign.value,
         "formula": print_formula(node.sf.formula, style)}
    if node.rule is not None:
        d["rule"] = node.rule.value
    if node.premiss_refs:
        d["premiss_refs"] = list(node.premiss_refs)
    return d


def _segment_list(seg: Segment, style) -> list[dict]:
    out = [_node_dict(n, style) for n in seg.nodes]
    end = seg.end
    if isinstance(end, Split):
        d = {"kind": "split", "pb_formula": print_formula(end.pb_formula, style)}
        if end.candidate_ref is not None:
            d["premiss_refs"] = [end.candidate_ref]
        d["children"] = [_segment_list(end.left, style), _segment_list(end.right, style)]
        out.append(d)
    elif isinstance(end, Closure):
        out.append({"kind": "closure", "premiss_refs": list(end.refs)})
    elif end in (OPEN_END, UNEXPLORED):
        out.append({"kind": end})
    return out


def proof_to_dict(result: ProofResult, timing: bool = False, style: str = "ascii") -> dict:
    st = result.stats
    stats = {
        "formula_nodes": st.formula_nodes,
        "branches": st.branches,
        "pb_applications": st.pb_applications,
        "rule_applications": st.rule_counts(),
        "peak_open_stack": st.peak_open_stack,
    }
    if timing:
        stats["elapsed_ms"] = round(st.elapsed_ms, 3)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "sequent": print_sequent(result.sequent),
        "config": result.config.as_dict(),
        "verdict": result.verdict.value,
        "stats": stats,
        "tree": _segment_list(result.root, style),
    }
    if result.open_branch is not None:
        model = extract_countermodel(result.open_branch)
        doc["countermodel"] = [[print_formula(f, style), model.values[f.digest]] for f in model.domain]
    return doc


def proof_to_json(result: ProofResult, timing: bool = False, indent: int | None = 2) -> str:
    return json.dumps(proof_to_dict(result, timing), indent=indent, ensure_ascii=False)


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def proof_to_dot(result: ProofResult, style: str = "unicode") -> str:
    lines = [
        "digraph proof {",
        f'  // schema_version={SCHEMA_VERSION}',
        '  node [shape=plaintext, fontname="monospace"];',
    ]
    counter = {"split": 0, "leaf": 0}

    def emit(seg: Segment, parent: str | None):
        prev = parent
        for node in seg.nodes:
            name = f"n{node.id}"
            label = f"{node.id}. {node.sf.sign.value} {print_formula(node.sf.formula, style)}"
            if node.rule is not None:
                label += f"  [{node.rule.value}]"
            lines.append(f'  {name} [label="{_dot_escape(label)}"];')
            if prev:
                lines.append(f"  {prev} -> {name};")
            prev = name
        end = seg.end
        if isinstance(end, Split):
            k = counter["split"]
            counter["split"] += 1
            name = f"s{k}"
            label = f"PB {print_formula(end.pb_formula, style)}"
            lines.append(f'  {name} [label="{_dot_escape(label)}", shape=diamond];')
            if prev:
                lines.append(f"  {prev} -> {name};")
            emit(end.left, name)
            emit(end.right, name)
            return
        k = counter["leaf"]
        counter["leaf"] += 1
        name = f"x{k}"
        label = "×" if isinstance(end, Closure) else ("open" if end == OPEN_END else "…")
        lines.append(f'  {name} [label="{label}"];')
        if prev:
            lines.append(f"  {prev} -> {name};")

    emit(result.root, None)
    lines.append("}")
    return "\n".join(lines) + "\n"


def proof_to_text(result: ProofResult, style: str = "unicode") -> str:
    out = []

    def emit(seg: Segment, depth: int):
        pad = "  " * depth
        for node in seg.nodes:
            why = node.rule.value if node.rule is not None else "premise"
            refs = ",".join(map(str, node.premiss_refs))
            tag = f"{why}({refs})" if refs else why
            out.append(f"{pad}{node.id:>4}  {node.sf.sign.value} {print_formula(node.sf.formula, style)}    [{tag}]")
        end = seg.end
        if isinstance(end, Split):
            out.append(f"{pad}  PB on {print_formula(end.pb_formula, style)}")
            emit(end.left, depth + 1)
            emit(end.right, depth + 1)
        elif isinstance(end, Closure):
            out.append(f"{pad}  × ({end.refs[0]}, {end.refs[1]})")
        elif end == OPEN_END:
            out.append(f"{pad}  open")
        elif end == UNEXPLORED:
            out.append(f"{pad}  (not explored)")

    emit(result.root, 0)
    return "\n".join(out) + "\n"
