"""JSON machine documents (``.vm.json``) and DOT export."""

from __future__ import annotations

import json

from .core import ENV, InvalidMachineError, VirusMachine, make_machine, validate_machine

TOP_KEYS = (
    "name",
    "note",
    "hosts",
    "channels",
    "instructions",
    "instruction_edges",
    "attachments",
    "initial_instruction",
)
REQUIRED_KEYS = set(TOP_KEYS) - {"note", "name"}


class MachineFormatError(ValueError):
    """Malformed machine document; ``where`` names the offending field."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


def serialize_machine(m: VirusMachine) -> str:
    doc = {"name": m.name}
    if m.note:
        doc["note"] = m.note
    doc["hosts"] = [{"id": h, "viruses": m.initial_viruses.get(h, 0)} for h in m.hosts]
    doc["channels"] = [{"from": c.source, "to": c.target, "weight": c.weight} for c in m.channels]
    doc["instructions"] = list(m.instructions)
    doc["instruction_edges"] = [
        {"from": e.source, "to": e.target, "weight": e.weight} for e in m.instruction_edges
    ]
    doc["attachments"] = [
        {"instruction": a.instruction, "channel": {"from": a.channel[0], "to": a.channel[1]}}
        for a in m.attachments
    ]
    doc["initial_instruction"] = m.initial_instruction
    return json.dumps(doc, indent=2) + "\n"


def _expect(obj, typ, where):
    if not isinstance(obj, typ) or (typ is int and isinstance(obj, bool)):
        name = {list: "array", dict: "object", str: "string", int: "integer"}[typ]
        raise MachineFormatError(where, f"expected {name}, got {type(obj).__name__}")
    return obj


def _record(obj, keys, where):
    _expect(obj, dict, where)
    extra = set(obj) - set(keys)
    if extra:
        raise MachineFormatError(where, f"unknown keys {sorted(extra)}")
    missing = set(keys) - set(obj)
    if missing:
        raise MachineFormatError(where, f"missing keys {sorted(missing)}")
    return obj


def parse_machine(text: str) -> VirusMachine:
    """Parse and validate a machine document.

    Raises :class:`MachineFormatError` for malformed documents and
    :class:`InvalidMachineError` when the described machine breaks a
    structural rule.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise MachineFormatError(f"line {err.lineno} column {err.colno}", err.msg) from None
    _expect(doc, dict, "document")
    extra = set(doc) - set(TOP_KEYS)
    if extra:
        raise MachineFormatError("document", f"unknown keys {sorted(extra)}")
    missing = REQUIRED_KEYS - set(doc)
    if missing:
        raise MachineFormatError("document", f"missing keys {sorted(missing)}")

    hosts = []
    for k, h in enumerate(_expect(doc["hosts"], list, "hosts")):
        where = f"hosts[{k}]"
        _record(h, ("id", "viruses"), where)
        hosts.append((_expect(h["id"], str, where + ".id"), _expect(h["viruses"], int, where + ".viruses")))

    channels = []
    for k, c in enumerate(_expect(doc["channels"], list, "channels")):
        where = f"channels[{k}]"
        _record(c, ("from", "to", "weight"), where)
        channels.append((
            _expect(c["from"], str, where + ".from"),
            _expect(c["to"], str, where + ".to"),
            _expect(c["weight"], int, where + ".weight"),
        ))

    instructions = [
        _expect(i, str, f"instructions[{k}]")
        for k, i in enumerate(_expect(doc["instructions"], list, "instructions"))
    ]

    edges = []
    for k, e in enumerate(_expect(doc["instruction_edges"], list, "instruction_edges")):
        where = f"instruction_edges[{k}]"
        _record(e, ("from", "to", "weight"), where)
        edges.append((
            _expect(e["from"], str, where + ".from"),
            _expect(e["to"], str, where + ".to"),
            _expect(e["weight"], int, where + ".weight"),
        ))

    attachments = []
    for k, a in enumerate(_expect(doc["attachments"], list, "attachments")):
        where = f"attachments[{k}]"
        _record(a, ("instruction", "channel"), where)
        ch = _record(a["channel"], ("from", "to"), where + ".channel")
        attachments.append((
            _expect(a["instruction"], str, where + ".instruction"),
            (_expect(ch["from"], str, where + ".channel.from"), _expect(ch["to"], str, where + ".channel.to")),
        ))

    m = make_machine(
        hosts=hosts,
        channels=channels,
        instructions=instructions,
        edges=edges,
        attachments=attachments,
        initial_instruction=_expect(doc["initial_instruction"], str, "initial_instruction"),
        name=_expect(doc.get("name", "vm"), str, "name"),
        note=_expect(doc.get("note", ""), str, "note"),
    )
    report = validate_machine(m)
    if not report.ok:
        raise InvalidMachineError(report)
    return m


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _weight_attr(w: int) -> str:
    return "" if w == 1 else f" [label={_q(w)}]"


def export_dot(m: VirusMachine, layer: str = "combined") -> str:
    """DOT text for the host layer, the instruction layer, or both.

    Hosts are boxes labelled with their initial viruses, the environment is
    a double octagon, instructions are small circles.  Weight-1 labels are
    omitted.  In the combined layer every channel passes through a point
    node so attachments can be drawn as dashed edges onto it.
    """
    if layer not in ("host", "instruction", "combined"):
        raise ValueError(f"unknown layer {layer!r}")
    lines = [f"digraph {_q(m.name)} {{", "  rankdir=LR;"]

    if layer in ("host", "combined"):
        for h in m.hosts:
            lines.append(f"  {_q(h)} [shape=box, label={_q(f'{h}: {m.initial_viruses.get(h, 0)}')}];")
        if any(c.target == ENV for c in m.channels):
            lines.append(f"  {_q(ENV)} [shape=doubleoctagon, label={_q('h0 (env)')}];")
        for c in m.channels:
            if layer == "host":
                lines.append(f"  {_q(c.source)} -> {_q(c.target)}{_weight_attr(c.weight)};")
            else:
                mid = _q(f"ch:{c.source}->{c.target}")
                lines.append(f"  {mid} [shape=point];")
                lines.append(f"  {_q(c.source)} -> {mid} [arrowhead=none];")
                lines.append(f"  {mid} -> {_q(c.target)}{_weight_attr(c.weight)};")

    if layer in ("instruction", "combined"):
        for i in m.instructions:
            lines.append(f"  {_q(i)} [shape=circle, color=blue];")
        for e in m.instruction_edges:
            lines.append(f"  {_q(e.source)} -> {_q(e.target)}{_weight_attr(e.weight)};")

    if layer == "combined":
        for a in m.attachments:
            mid = _q(f"ch:{a.channel[0]}->{a.channel[1]}")
            lines.append(f"  {_q(a.instruction)} -> {mid} [style=dashed, color=red, arrowhead=none];")

    lines.append("}")
    return "\n".join(lines) + "\n"
