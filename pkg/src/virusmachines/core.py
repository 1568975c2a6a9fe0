"""Static description of a virus machine and its configurations.

A machine has three graphs over a single, identity-free virus object:
the weighted host graph (hosts plus the environment ``h0``), the
instruction graph with edge weights in {1, 2}, and the attachment
relation tying each instruction to at most one channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional

ENV = "h0"
HALT = "#"

ChannelKey = tuple[str, str]


class InvalidMachineError(ValueError):
    """Raised when an operation needs a valid machine and gets a broken one."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        lines = "; ".join(str(v) for v in report.violations)
        super().__init__(f"invalid virus machine: {lines}")


@dataclass(frozen=True)
class Channel:
    source: str
    target: str
    weight: int

    @property
    def key(self) -> ChannelKey:
        return (self.source, self.target)


@dataclass(frozen=True)
class InstructionEdge:
    source: str
    target: str
    weight: int = 1


@dataclass(frozen=True)
class Attachment:
    instruction: str
    channel: ChannelKey


@dataclass(frozen=True)
class VirusMachine:
    """Hosts, channels, instructions and the three graphs joining them.

    ``hosts`` and ``instructions`` are ordered; that order is the canonical
    order used for tie sets, serialization and configuration tuples.
    Missing entries in ``initial_viruses`` mean zero viruses.
    """

    hosts: tuple[str, ...]
    channels: tuple[Channel, ...]
    instructions: tuple[str, ...]
    instruction_edges: tuple[InstructionEdge, ...]
    attachments: tuple[Attachment, ...]
    initial_viruses: Mapping[str, int]
    initial_instruction: str
    name: str = "vm"
    note: str = ""

    def __post_init__(self):
        # accept lists from callers, store tuples
        for attr in ("hosts", "channels", "instructions", "instruction_edges", "attachments"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        object.__setattr__(self, "initial_viruses", dict(self.initial_viruses))

    def __hash__(self):
        return hash((self.name, self.hosts, self.instructions, self.channels))

    @property
    def degree(self) -> tuple[int, int]:
        return (len(self.hosts), len(self.instructions))

    @cached_property
    def host_index(self) -> dict[str, int]:
        return {h: k for k, h in enumerate(self.hosts)}

    @cached_property
    def instruction_index(self) -> dict[str, int]:
        return {i: k for k, i in enumerate(self.instructions)}

    @cached_property
    def channel_map(self) -> dict[ChannelKey, Channel]:
        return {c.key: c for c in self.channels}

    @cached_property
    def attached_channel(self) -> dict[str, Channel]:
        """Instruction id -> the channel it opens (unattached ids absent)."""
        out = {}
        for a in self.attachments:
            ch = self.channel_map.get(a.channel)
            if ch is not None:
                out.setdefault(a.instruction, ch)
        return out

    @cached_property
    def out_edges(self) -> dict[str, tuple[InstructionEdge, ...]]:
        """Outgoing instruction edges, targets in canonical order."""
        order = self.instruction_index
        out: dict[str, list[InstructionEdge]] = {i: [] for i in self.instructions}
        for e in self.instruction_edges:
            out.setdefault(e.source, []).append(e)
        return {
            i: tuple(sorted(es, key=lambda e: order.get(e.target, len(order))))
            for i, es in out.items()
        }

    def initial_counts(self) -> tuple[int, ...]:
        return tuple(self.initial_viruses.get(h, 0) for h in self.hosts)

    def host_adjacency(self) -> dict[str, list[str]]:
        """Host graph as an adjacency map; includes the environment node."""
        adj: dict[str, list[str]] = {h: [] for h in self.hosts}
        adj[ENV] = []
        for c in self.channels:
            adj.setdefault(c.source, []).append(c.target)
            adj.setdefault(c.target, [])
        return adj

    def instruction_adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {i: [] for i in self.instructions}
        for e in self.instruction_edges:
            adj.setdefault(e.source, []).append(e.target)
            adj.setdefault(e.target, [])
        return adj


@dataclass(frozen=True)
class Configuration:
    """Per-host counts (in host order), the next instruction, and the output.

    ``next_instruction`` is ``HALT`` for halting configurations.
    """

    host_counts: tuple[int, ...]
    next_instruction: str
    env_count: int
    step_index: int = 0

    @property
    def halted(self) -> bool:
        return self.next_instruction == HALT

    def state(self) -> tuple:
        """Configuration without the step index; used for deduplication."""
        return (self.host_counts, self.next_instruction, self.env_count)

    def as_tuple(self) -> tuple:
        """The ``(a_1, ..., a_p, u_t, a_0)`` form used when writing traces by hand."""
        return (*self.host_counts, self.next_instruction, self.env_count)

    def count(self, m: VirusMachine, host: str) -> int:
        if host == ENV:
            return self.env_count
        return self.host_counts[m.host_index[host]]

    def __str__(self):
        inner = ",".join(str(x) for x in self.as_tuple())
        return f"C{self.step_index}=({inner})"


@dataclass(frozen=True, order=True)
class Violation:
    code: str
    subject: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.subject}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def subjects(self) -> set[str]:
        return {v.subject for v in self.violations}


def _is_count(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def validate_machine(m: VirusMachine) -> ValidationReport:
    """Check every structural constraint and list the breaches.

    Never raises; an empty report means the machine is usable.
    """
    out: list[Violation] = []

    def bad(code, subject, msg):
        out.append(Violation(code, str(subject), msg))

    hosts = set()
    for h in m.hosts:
        if h == ENV:
            bad("reserved-host", h, "the environment cannot be declared as a host")
        elif h in hosts:
            bad("duplicate-host", h, "host declared twice")
        hosts.add(h)

    instrs = set()
    for i in m.instructions:
        if i == HALT:
            bad("reserved-instruction", i, "'#' is the halting marker")
        elif i in instrs:
            bad("duplicate-instruction", i, "instruction declared twice")
        instrs.add(i)
    if not m.instructions:
        bad("no-instructions", m.name, "a machine needs at least one instruction")
    elif m.initial_instruction not in instrs:
        bad("unknown-initial", m.initial_instruction, "initial instruction is not declared")

    keys = set()
    for c in m.channels:
        subj = f"({c.source},{c.target})"
        if c.source == ENV:
            bad("env-source", subj, "channels cannot leave the environment")
        elif c.source not in hosts:
            bad("unknown-host", subj, f"source {c.source!r} is not a host")
        if c.target != ENV and c.target not in hosts:
            bad("unknown-host", subj, f"target {c.target!r} is not a host")
        if c.source == c.target:
            bad("self-channel", subj, "channel source equals target")
        if not _is_count(c.weight) or c.weight < 1:
            bad("channel-weight", subj, f"weight {c.weight!r} must be an integer >= 1")
        if c.key in keys:
            bad("duplicate-channel", subj, "parallel channel between the same hosts")
        keys.add(c.key)

    edge_keys = set()
    for e in m.instruction_edges:
        subj = f"{e.source}->{e.target}"
        for end in (e.source, e.target):
            if end not in instrs:
                bad("unknown-instruction", subj, f"{end!r} is not an instruction")
        if e.weight not in (1, 2) or not _is_count(e.weight):
            bad("edge-weight", subj, f"weight {e.weight!r} not in {{1, 2}}")
        if (e.source, e.target) in edge_keys:
            bad("duplicate-edge", subj, "instruction edge declared twice")
        edge_keys.add((e.source, e.target))

    attached: dict[str, int] = {}
    for a in m.attachments:
        if a.instruction not in instrs:
            bad("unknown-instruction", a.instruction, "attachment names an undeclared instruction")
        if tuple(a.channel) not in keys:
            bad("unknown-channel", a.instruction, f"attached to undeclared channel {tuple(a.channel)}")
        attached[a.instruction] = attached.get(a.instruction, 0) + 1
    for i, n in attached.items():
        if n > 1:
            bad("multi-attachment", i, f"instruction attached to {n} channels")

    for h, n in m.initial_viruses.items():
        if h not in hosts:
            bad("unknown-host", h, "initial viruses given for an undeclared host")
        if not _is_count(n) or n < 0:
            bad("virus-count", h, f"initial count {n!r} must be a nonnegative integer")

    return ValidationReport(sorted(set(out)))


def ensure_valid(m: VirusMachine) -> VirusMachine:
    report = validate_machine(m)
    if not report.ok:
        raise InvalidMachineError(report)
    return m


def initial_configuration(m: VirusMachine) -> Configuration:
    ensure_valid(m)
    return Configuration(m.initial_counts(), m.initial_instruction, 0, 0)


def make_machine(
    hosts,
    channels,
    instructions,
    edges=(),
    attachments=(),
    initial_instruction: Optional[str] = None,
    name: str = "vm",
    note: str = "",
) -> VirusMachine:
    """Shorthand builder taking plain tuples.

    ``hosts`` is a sequence of ``(id, viruses)``; ``channels`` of
    ``(source, target, weight)``; ``edges`` of ``(source, target[, weight])``;
    ``attachments`` maps instruction id to ``(source, target)``.
    """
    hosts = list(hosts)
    instructions = list(instructions)
    if isinstance(attachments, Mapping):
        attachments = attachments.items()
    return VirusMachine(
        hosts=[h for h, _ in hosts],
        channels=[Channel(s, t, w) for s, t, w in channels],
        instructions=instructions,
        instruction_edges=[InstructionEdge(*e) for e in edges],
        attachments=[Attachment(i, tuple(ch)) for i, ch in attachments],
        initial_viruses={h: n for h, n in hosts},
        initial_instruction=initial_instruction or (instructions[0] if instructions else ""),
        name=name,
        note=note,
    )
