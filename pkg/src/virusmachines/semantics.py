"""Transition relation, traces and generated-set enumeration."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import ENV, HALT, Configuration, VirusMachine, ensure_valid, initial_configuration


class UnknownInstructionError(KeyError):
    pass


class ScriptExhaustedError(RuntimeError):
    def __init__(self, step_index: int, ties: Sequence[str]):
        self.step_index = step_index
        self.ties = tuple(ties)
        super().__init__(
            f"choice script ran out at step {step_index} (tie between {', '.join(ties)})"
        )


class OracleLimitError(RuntimeError):
    """The brute-force oracle refuses machines with too many choice sequences."""


def successors(m: VirusMachine, c: Configuration) -> list[Configuration]:
    """All configurations reachable in one transition, in canonical order.

    A halting configuration has none.  When the activated instruction has
    no outgoing edge the single successor is the HALT-marked configuration.
    """
    if c.halted:
        return []
    instr = c.next_instruction
    if instr not in m.instruction_index:
        raise UnknownInstructionError(instr)

    counts = c.host_counts
    env = c.env_count
    ch = m.attached_channel.get(instr)
    transmitted = False
    if ch is not None:
        src = m.host_index[ch.source]
        if counts[src] > 0:
            transmitted = True
            new = list(counts)
            new[src] -= 1
            if ch.target == ENV:
                env += ch.weight
            else:
                new[m.host_index[ch.target]] += ch.weight
            counts = tuple(new)

    edges = m.out_edges.get(instr, ())
    step = c.step_index + 1
    if not edges:
        return [Configuration(counts, HALT, env, step)]
    best = max(e.weight for e in edges) if transmitted else min(e.weight for e in edges)
    return [Configuration(counts, e.target, env, step) for e in edges if e.weight == best]


class ChoicePolicy:
    """Picks an index into a tie set of two or more successors."""

    def choose(self, step_index: int, ties: Sequence[str]) -> int:
        raise NotImplementedError


class ScriptedPolicy(ChoicePolicy):
    """Replays a fixed list of choice indices, one per nondeterministic step.

    Forced steps (a single successor) do not consume script entries.
    """

    def __init__(self, script: Sequence[int]):
        self.script = list(script)
        self._pos = 0

    def choose(self, step_index, ties):
        if self._pos >= len(self.script):
            raise ScriptExhaustedError(step_index, ties)
        k = self.script[self._pos]
        self._pos += 1
        if not 0 <= k < len(ties):
            raise IndexError(f"choice {k} out of range for tie set {list(ties)} at step {step_index}")
        return k


class RandomPolicy(ChoicePolicy):
    def __init__(self, seed: Optional[int] = None):
        self.seed = seed
        self._rng = random.Random(seed)

    def choose(self, step_index, ties):
        return self._rng.randrange(len(ties))


@dataclass(frozen=True)
class ChoicePoint:
    step_index: int
    ties: tuple[str, ...]
    chosen: int


@dataclass
class ComputationTrace:
    configurations: list[Configuration]
    choices: list[ChoicePoint] = field(default_factory=list)

    @property
    def halted(self) -> bool:
        return self.configurations[-1].halted

    @property
    def emitted(self) -> Optional[int]:
        return self.configurations[-1].env_count if self.halted else None

    @property
    def steps(self) -> int:
        """Number of transitions performed."""
        return len(self.configurations) - 1

    def at(self, step: int) -> Optional[Configuration]:
        if 0 <= step < len(self.configurations):
            return self.configurations[step]
        return None


def run_trace(m: VirusMachine, policy: ChoicePolicy, max_steps: int) -> ComputationTrace:
    """Follow one computation, asking ``policy`` at every tie."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    c = initial_configuration(m)
    trace = ComputationTrace([c])
    while not c.halted and c.step_index < max_steps:
        succ = successors(m, c)
        if len(succ) == 1:
            c = succ[0]
        else:
            ties = tuple(s.next_instruction for s in succ)
            k = policy.choose(c.step_index, ties)
            trace.choices.append(ChoicePoint(c.step_index, ties, k))
            c = succ[k]
        trace.configurations.append(c)
    return trace


@dataclass(frozen=True)
class Mismatch:
    step_index: int
    field: str
    expected: object
    actual: object

    def __str__(self):
        return f"step {self.step_index}: {self.field} expected {self.expected!r}, got {self.actual!r}"


@dataclass
class CheckReport:
    checked: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _expected_config(m: VirusMachine, exp) -> Configuration:
    if isinstance(exp, Configuration):
        return exp
    # (a_1..a_p, u, a_0) tuple form
    p = len(m.hosts)
    exp = tuple(exp)
    if len(exp) != p + 2:
        raise ValueError(f"expected tuple of length {p + 2}, got {exp!r}")
    return Configuration(tuple(exp[:p]), exp[p], exp[p + 1])


def assert_trace(m: VirusMachine, policy: ChoicePolicy, expectations) -> CheckReport:
    """Run one trace and compare it field by field against expected configurations.

    ``expectations`` is a sequence of ``(step, configuration)`` where the
    configuration may be a ``Configuration`` or a ``(a_1..a_p, u, a_0)`` tuple.
    Short traces and script exhaustion are reported, not raised.
    """
    expectations = sorted(expectations, key=lambda e: e[0])
    report = CheckReport()
    if not expectations:
        return report
    horizon = max(1, expectations[-1][0])
    try:
        trace = run_trace(m, policy, horizon)
    except ScriptExhaustedError as err:
        report.mismatches.append(Mismatch(err.step_index, "script", "a choice", "exhausted"))
        return report

    for step, exp in expectations:
        report.checked += 1
        want = _expected_config(m, exp)
        got = trace.at(step)
        if got is None:
            report.mismatches.append(
                Mismatch(step, "length", f">= {step} steps", f"trace ended at step {trace.steps}")
            )
            continue
        for h, a, b in zip(m.hosts, want.host_counts, got.host_counts):
            if a != b:
                report.mismatches.append(Mismatch(step, f"host_counts[{h}]", a, b))
        if want.next_instruction != got.next_instruction:
            report.mismatches.append(
                Mismatch(step, "next_instruction", want.next_instruction, got.next_instruction)
            )
        if want.env_count != got.env_count:
            report.mismatches.append(Mismatch(step, "env_count", want.env_count, got.env_count))
    return report


@dataclass(frozen=True)
class ExplorationBounds:
    max_steps: int = 10_000
    max_total_viruses: Optional[int] = None
    max_frontier: Optional[int] = None

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class GeneratedSetReport:
    numbers: tuple[int, ...]
    exact: bool
    observed_nvh: int
    branch_count: int = 0
    truncated_branch_count: int = 0

    def to_dict(self) -> dict:
        return {
            "numbers": list(self.numbers),
            "exact": self.exact,
            "observed_nvh": self.observed_nvh,
            "branch_count": self.branch_count,
            "truncated_branch_count": self.truncated_branch_count,
        }

    def __str__(self):
        nums = "{" + ", ".join(str(n) for n in self.numbers) + "}"
        return f"{nums} ({'exact' if self.exact else 'truncated'})"


def enumerate_generated_set(m: VirusMachine, bounds: ExplorationBounds) -> GeneratedSetReport:
    """Breadth-first walk of the computation tree up to ``bounds``.

    Configurations are merged within a level only: two equal states at the
    same step have identical futures under the same remaining budget.
    ``exact`` is true iff nothing was cut off by a bound.
    """
    start = initial_configuration(m)
    numbers: set[int] = set()
    nvh = max(start.host_counts, default=0)
    halted = 0
    truncated = 0
    frontier = [start]
    step = 0
    while frontier:
        if step >= bounds.max_steps:
            truncated += len(frontier)
            break
        if bounds.max_frontier is not None and len(frontier) > bounds.max_frontier:
            truncated += len(frontier)
            break
        seen: dict[tuple, Configuration] = {}
        for c in frontier:
            for s in successors(m, c):
                key = s.state()
                if key in seen:
                    continue
                seen[key] = s
                if s.host_counts:
                    nvh = max(nvh, max(s.host_counts))
        frontier = []
        for key in sorted(seen, key=_state_order(m)):
            s = seen[key]
            if s.halted:
                numbers.add(s.env_count)
                halted += 1
            elif bounds.max_total_viruses is not None and sum(s.host_counts) > bounds.max_total_viruses:
                truncated += 1
            else:
                frontier.append(s)
        step += 1

    return GeneratedSetReport(
        numbers=tuple(sorted(numbers)),
        exact=truncated == 0,
        observed_nvh=nvh,
        branch_count=halted,
        truncated_branch_count=truncated,
    )


def _state_order(m: VirusMachine):
    idx = m.instruction_index
    return lambda key: (key[0], idx.get(key[1], -1), key[2])


def brute_force_oracle(m: VirusMachine, max_steps: int, max_sequences: int = 200_000) -> GeneratedSetReport:
    """Enumerate every choice sequence of length up to ``max_steps`` directly.

    Deliberately shares nothing with :func:`successors` or the breadth-first
    search: the step rule is re-derived here from the raw machine lists, and
    every sequence is walked separately without merging states.
    """
    ensure_valid(m)
    chan_of = {}
    weights = {(c.source, c.target): c.weight for c in m.channels}
    for a in m.attachments:
        chan_of[a.instruction] = tuple(a.channel)
    outs: dict[str, list[tuple[str, int]]] = {i: [] for i in m.instructions}
    for e in m.instruction_edges:
        outs[e.source].append((e.target, e.weight))
    pos = {i: k for k, i in enumerate(m.instructions)}
    for lst in outs.values():
        lst.sort(key=lambda t: pos[t[0]])

    numbers: set[int] = set()
    stats = {"leaves": 0, "halted": 0, "cut": 0, "nvh": max(m.initial_viruses.values(), default=0)}

    def walk(counts: dict, instr: str, env: int, depth: int):
        # counts/instr/env describe the configuration reached after `depth` steps
        if instr == HALT:
            stats["leaves"] += 1
            stats["halted"] += 1
            numbers.add(env)
            return
        if depth == max_steps:
            stats["leaves"] += 1
            stats["cut"] += 1
            return
        if stats["leaves"] > max_sequences:
            raise OracleLimitError(f"more than {max_sequences} choice sequences")
        counts = dict(counts)
        fired = False
        if instr in chan_of:
            src, dst = chan_of[instr]
            if counts[src] >= 1:
                fired = True
                counts[src] -= 1
                if dst == ENV:
                    env = env + weights[(src, dst)]
                else:
                    counts[dst] += weights[(src, dst)]
                stats["nvh"] = max(stats["nvh"], max(counts.values()))
        options = outs[instr]
        if not options:
            walk(counts, HALT, env, depth + 1)
            return
        pick = max if fired else min
        w = pick(wt for _, wt in options)
        for target, wt in options:
            if wt == w:
                walk(counts, target, env, depth + 1)

    walk({h: m.initial_viruses.get(h, 0) for h in m.hosts}, m.initial_instruction, 0, 0)
    return GeneratedSetReport(
        numbers=tuple(sorted(numbers)),
        exact=stats["cut"] == 0,
        observed_nvh=stats["nvh"],
        branch_count=stats["halted"],
        truncated_branch_count=stats["cut"],
    )
