"""Graph-level analysis: pruning, loop sizes, ingredient profiles, family rules."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from graphlib import CycleError, TopologicalSorter
from typing import Mapping, Iterable, Optional

from .core import ENV, VirusMachine, ensure_valid
from .semantics import GeneratedSetReport

DEFAULT_VERTEX_CAP = 64

Graph = Mapping[str, Iterable[str]]


class GraphTooLargeError(ValueError):
    pass


class CyclicGraphError(ValueError):
    pass


def reachable_instructions(m: VirusMachine) -> set[str]:
    """Instructions reachable from the initial one, itself included."""
    ensure_valid(m)
    adj = m.instruction_adjacency()
    seen = {m.initial_instruction}
    stack = [m.initial_instruction]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def prune_to_rooted_tree(m: VirusMachine) -> VirusMachine:
    """Drop instructions the computation can never activate.

    Hosts, channels and initial viruses are kept as they are.
    """
    keep = reachable_instructions(m)
    if len(keep) == len(m.instructions):
        return m
    return replace(
        m,
        instructions=[i for i in m.instructions if i in keep],
        instruction_edges=[e for e in m.instruction_edges if e.source in keep and e.target in keep],
        attachments=[a for a in m.attachments if a.instruction in keep],
    )


def _normalize(g: Graph) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {}
    for v, succ in g.items():
        adj.setdefault(v, [])
        for w in succ:
            adj[v].append(w)
            adj.setdefault(w, [])
    return adj


def longest_simple_cycle(g: Graph, vertex_cap: int = DEFAULT_VERTEX_CAP) -> int:
    """Vertex count of the longest simple cycle, 0 when ``g`` is acyclic.

    A self-loop is a cycle of length 1.  The search is exhaustive: each
    cycle is rooted at its lowest-ranked vertex and grown by DFS over
    higher-ranked vertices only, so the cost is exponential in the worst
    case and the vertex cap guards against accidental misuse.
    """
    adj = _normalize(g)
    if len(adj) > vertex_cap:
        raise GraphTooLargeError(f"{len(adj)} vertices exceeds cap {vertex_cap}")
    rank = {v: k for k, v in enumerate(adj)}
    best = 0
    for root in adj:
        r = rank[root]
        on_path = {root}
        stack = [(root, iter(adj[root]))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if w == root:
                    best = max(best, len(stack))
                elif rank[w] > r and w not in on_path:
                    on_path.add(w)
                    stack.append((w, iter(adj[w])))
                    break
            else:
                stack.pop()
                on_path.discard(v)
        if best == len(adj):
            break
    return best


def tree_depth(g: Graph, root: str) -> int:
    """Edges on the longest path from ``root``; refuses cyclic input.

    Only the part of ``g`` reachable from ``root`` is examined.
    """
    adj = _normalize(g)
    if root not in adj:
        raise KeyError(root)
    depth: dict[str, int] = {}
    state: dict[str, int] = {}  # 1 = on stack, 2 = done
    stack = [(root, iter(adj[root]))]
    state[root] = 1
    while stack:
        v, it = stack[-1]
        for w in it:
            s = state.get(w)
            if s == 1:
                raise CyclicGraphError(f"cycle through {w!r}")
            if s is None:
                state[w] = 1
                stack.append((w, iter(adj[w])))
                break
        else:
            stack.pop()
            state[v] = 2
            depth[v] = 1 + max((depth[w] for w in adj[v]), default=-1)
    return depth[root]


def is_acyclic(g: Graph) -> bool:
    try:
        TopologicalSorter({v: list(s) for v, s in g.items()}).prepare()
    except CycleError:
        return False
    return True


def _loop_size(g: Graph, vertex_cap: int) -> int:
    return 0 if is_acyclic(g) else longest_simple_cycle(g, vertex_cap)


@dataclass(frozen=True)
class IngredientProfile:
    """Resource tuple NVM_beta(h_p, i_q, nvh_r, wc_s, outd_t, alpha_host^u, alpha_inst^v)."""

    beta: bool
    hosts_p: int
    instructions_q: int
    nvh_r: Optional[int]
    nvh_exact: bool
    wc_s: int
    outd_t: int
    alpha_host_u: int
    alpha_inst_v: int

    def as_tuple(self) -> tuple:
        return (
            self.beta,
            self.hosts_p,
            self.instructions_q,
            self.nvh_r,
            self.wc_s,
            self.outd_t,
            self.alpha_host_u,
            self.alpha_inst_v,
        )

    def to_dict(self) -> dict:
        return {
            "beta": "T" if self.beta else "F",
            "h": self.hosts_p,
            "i": self.instructions_q,
            "nvh": self.nvh_r,
            "nvh_exact": self.nvh_exact,
            "wc": self.wc_s,
            "outd": self.outd_t,
            "alpha_host": self.alpha_host_u,
            "alpha_inst": self.alpha_inst_v,
        }

    def __str__(self):
        r = "?" if self.nvh_r is None else f"{self.nvh_r}{'' if self.nvh_exact else '+'}"
        return (
            f"NVM_{'T' if self.beta else 'F'}(h{self.hosts_p}, i{self.instructions_q}, nvh{r}, "
            f"wc{self.wc_s}, outd{self.outd_t}, a_host{self.alpha_host_u}, a_inst{self.alpha_inst_v})"
        )


def channel_usage(m: VirusMachine) -> dict[tuple[str, str], int]:
    use = {c.key: 0 for c in m.channels}
    for a in m.attachments:
        use[tuple(a.channel)] = use.get(tuple(a.channel), 0) + 1
    return use


def ingredient_profile(
    m: VirusMachine,
    enumeration: Optional[GeneratedSetReport] = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> IngredientProfile:
    ensure_valid(m)
    outdeg: dict[str, int] = {h: 0 for h in m.hosts}
    for c in m.channels:
        outdeg[c.source] += 1
    return IngredientProfile(
        beta=all(n <= 1 for n in channel_usage(m).values()),
        hosts_p=len(m.hosts),
        instructions_q=len(m.instructions),
        nvh_r=None if enumeration is None else enumeration.observed_nvh,
        nvh_exact=bool(enumeration is not None and enumeration.exact),
        wc_s=max((c.weight for c in m.channels), default=0),
        outd_t=max(outdeg.values(), default=0),
        alpha_host_u=_loop_size(m.host_adjacency(), vertex_cap),
        alpha_inst_v=_loop_size(m.instruction_adjacency(), vertex_cap),
    )


def acyclic_host_bound(m: VirusMachine) -> int:
    """Largest number any computation can emit when the host graph is acyclic.

    Each virus at host ``h`` can reach the environment at most multiplied by
    the heaviest product of channel weights along a path ``h -> ... -> h0``.
    """
    ensure_valid(m)
    adj = m.host_adjacency()
    if not is_acyclic(adj):
        raise CyclicGraphError("host graph has a cycle; no static output bound")
    out: dict[str, list[tuple[str, int]]] = {h: [] for h in adj}
    for c in m.channels:
        out[c.source].append((c.target, c.weight))

    gain: dict[str, int] = {ENV: 1}

    def best(h: str) -> int:
        if h not in gain:
            gain[h] = max((w * best(t) for t, w in out[h]), default=0)
        return gain[h]

    return sum(m.initial_viruses.get(h, 0) * best(h) for h in m.hosts)


@dataclass(frozen=True)
class Verdict:
    rule: str
    family: str
    verdict: str  # "member", "inconclusive", "signature-match", "signature-mismatch"
    justification: str


@dataclass
class ClassificationReport:
    verdicts: list[Verdict] = field(default_factory=list)

    def members(self) -> set[str]:
        return {v.family for v in self.verdicts if v.verdict == "member"}

    def signatures(self) -> set[str]:
        return {v.rule for v in self.verdicts if v.verdict == "signature-match"}

    def to_list(self) -> list[dict]:
        return [
            {"rule": v.rule, "family": v.family, "verdict": v.verdict, "justification": v.justification}
            for v in self.verdicts
        ]


# Resource rows of the normal-form table: bounds are "at most"; None is unbounded.
# Order: h, i, nvh, wc, outd, alpha_host, alpha_inst, beta (None = any).
TABLE_ROWS = [
    ("singleton", "Singleton", (1, 1, 1, 1, 1, 0, 0, True)),
    ("nfin-host", "NFIN", (1, None, None, 1, 1, 0, 0, None)),
    ("nfin-virus", "NFIN", (None, None, 1, None, 1, 0, 0, True)),
    ("nfin-instgraph", "NFIN", (2, None, 2, 2, 2, 2, 0, None)),
    ("nfin-strict", "NFIN", (2, None, 2, 2, 2, 2, 3, None)),
    ("slin-beta", "SLIN", (None, None, 2, None, 2, 2, 3, True)),
    ("slin-2host", "SLIN", (2, None, 2, 2, 2, 2, None, None)),
    ("nre", "NRE", (None, None, None, 2, None, None, None, None)),
]

_FIELDS = ("h", "i", "nvh", "wc", "outd", "alpha_host", "alpha_inst")


def _row_matches(profile: IngredientProfile, row) -> tuple[bool, str]:
    vals = (
        profile.hosts_p,
        profile.instructions_q,
        profile.nvh_r,
        profile.wc_s,
        profile.outd_t,
        profile.alpha_host_u,
        profile.alpha_inst_v,
    )
    misses = []
    for name, v, bound in zip(_FIELDS, vals, row[:7]):
        if bound is None:
            continue
        if v is None:
            misses.append(f"{name} unknown")
        elif v > bound:
            misses.append(f"{name}={v}>{bound}")
    if row[7] is True and not profile.beta:
        misses.append("beta=F")
    return (not misses, ", ".join(misses))


def classify(m: VirusMachine, profile: IngredientProfile) -> ClassificationReport:
    """Apply the sufficient conditions and report table-row signature matches.

    Only the sufficient conditions produce "member" verdicts; row matches
    are informational since a resource signature alone does not fix the
    generated family.
    """
    report = ClassificationReport()
    add = report.verdicts.append

    if profile.alpha_host_u == 0:
        bound = acyclic_host_bound(m)
        add(Verdict("host-acyclic", "NFIN", "member",
                    f"host graph acyclic; every output <= {bound}"))
    else:
        add(Verdict("host-acyclic", "NFIN", "inconclusive",
                    f"host graph has a loop of size {profile.alpha_host_u}"))

    pruned = prune_to_rooted_tree(m)
    inst = pruned.instruction_adjacency()
    if is_acyclic(inst):
        depth = tree_depth(inst, pruned.initial_instruction)
        add(Verdict("instruction-tree", "NFIN", "member",
                    f"reachable instruction graph is a tree of depth {depth}; "
                    f"every computation halts within {depth + 1} steps"))
    else:
        add(Verdict("instruction-tree", "NFIN", "inconclusive",
                    "reachable instruction graph has a cycle"))

    q = len(pruned.instructions)
    if q == 1:
        add(Verdict("one-instruction", "Singleton", "member", "one reachable instruction"))
    elif profile.hosts_p == 1 and profile.nvh_r == 1 and profile.nvh_exact:
        add(Verdict("one-host-one-virus", "Singleton", "member",
                    "one host holding at most one virus"))
    else:
        add(Verdict("singleton", "Singleton", "inconclusive",
                    f"{q} reachable instructions, {profile.hosts_p} hosts"))

    if q <= 2:
        add(Verdict("two-instructions", "NLinFIN", "member", f"{q} reachable instructions"))
    if q <= 3:
        add(Verdict("three-instructions", "NCombFIN", "member", f"{q} reachable instructions"))

    for rule, family, row in TABLE_ROWS:
        ok, why = _row_matches(profile, row)
        if ok:
            note = "" if profile.nvh_exact or profile.nvh_r is None else " (nvh observed on a truncated exploration)"
            add(Verdict(rule, f"{family}-signature", "signature-match",
                        f"matches resource signature of {family}{note}"))
        else:
            add(Verdict(rule, f"{family}-signature", "signature-mismatch", why))
    return report
