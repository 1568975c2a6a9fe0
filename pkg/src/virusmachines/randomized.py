"""Seeded generators of small random machines for property checks."""

from __future__ import annotations

import random
from dataclasses import replace

from .core import ENV, Attachment, InstructionEdge, VirusMachine, ensure_valid, make_machine


def random_machine(
    rng: random.Random,
    max_hosts: int = 3,
    max_instructions: int = 4,
    max_weight: int = 3,
    max_viruses: int = 3,
    max_out_degree: int = 2,
    host_acyclic: bool = False,
    instruction_acyclic: bool = False,
    planted_loop: bool = False,
) -> VirusMachine:
    """A valid machine with random graphs.

    Host-acyclic machines only have channels h_a -> h_b with a < b (or into
    the environment); instruction-acyclic ones only forward edges.  With
    ``planted_loop`` the first instruction emits into the environment from a
    loaded host and ties between repeating itself and moving on, which makes
    multi-valued generated sets common.
    """
    p = rng.randint(1, max_hosts)
    q = rng.randint(1, max_instructions)
    hosts = [f"h{k}" for k in range(1, p + 1)]
    instrs = [f"i{k}" for k in range(1, q + 1)]

    channels = {}
    for a, src in enumerate(hosts):
        targets = [t for b, t in enumerate(hosts) if b != a and (not host_acyclic or b > a)]
        if rng.random() < 0.7:
            channels[(src, ENV)] = rng.randint(1, max_weight)
        for t in rng.sample(targets, rng.randint(0, min(2, len(targets)))):
            channels[(src, t)] = rng.randint(1, max_weight)

    # sinks make halting likely; the last instruction usually is one
    edges = {}
    for a, src in enumerate(instrs):
        pool = instrs[a + 1:] if instruction_acyclic else instrs
        sink_p = 0.85 if a == q - 1 else 0.1
        if not pool or rng.random() < sink_p:
            continue
        for t in rng.sample(pool, rng.randint(1, min(max_out_degree, len(pool)))):
            edges[(src, t)] = rng.choice((1, 1, 1, 2))

    keys = list(channels)
    att = {}
    for i in instrs:
        if keys and rng.random() < 0.85:
            att[i] = rng.choice(keys)

    viruses = {h: rng.randint(0, max_viruses) for h in hosts}
    if planted_loop and not instruction_acyclic and q > 1:
        src = rng.choice(hosts)
        channels.setdefault((src, ENV), rng.randint(1, max_weight))
        viruses[src] = max(viruses[src], 1)
        att[instrs[0]] = (src, ENV)
        w = rng.choice((1, 2))
        for key in [k for k in edges if k[0] == instrs[0]]:
            del edges[key]
        edges[(instrs[0], instrs[0])] = w
        edges[(instrs[0], rng.choice(instrs[1:]))] = w
        # keep a way out: the last instruction becomes a sink
        for key in [k for k in edges if k[0] == instrs[-1]]:
            del edges[key]

    return ensure_valid(make_machine(
        hosts=[(h, viruses[h]) for h in hosts],
        channels=[(s, t, w) for (s, t), w in channels.items()],
        instructions=instrs,
        edges=[(s, t, w) for (s, t), w in edges.items()],
        attachments=att,
        name="random",
    ))


def chain_flush_machine(rng: random.Random, max_hosts: int = 4, max_weight: int = 3, max_viruses: int = 3) -> VirusMachine:
    """Chain host graph h1 -> ... -> hp -> h0 with a deterministic draining program.

    Instruction ``i_k`` opens ``h_k``'s channel and loops on itself (weight 2)
    while it transmits, then moves on through its weight-1 edge.  Every virus
    therefore travels the whole chain, so the output equals the acyclic bound.
    """
    p = rng.randint(1, max_hosts)
    hosts = [f"h{k}" for k in range(1, p + 1)]
    targets = hosts[1:] + [ENV]
    instrs = [f"i{k}" for k in range(1, p + 2)]
    edges = []
    for k in range(p):
        edges.append((instrs[k], instrs[k], 2))
        edges.append((instrs[k], instrs[k + 1], 1))
    return ensure_valid(make_machine(
        hosts=[(h, rng.randint(0, max_viruses)) for h in hosts],
        channels=[(h, t, rng.randint(1, max_weight)) for h, t in zip(hosts, targets)],
        instructions=instrs,
        edges=edges,
        attachments={i: (h, t) for i, h, t in zip(instrs, hosts, targets)},
        name="chain_flush",
    ))


def add_unreachable_instructions(m: VirusMachine, rng: random.Random, k: int = 3) -> VirusMachine:
    """Append ``k`` instructions no computation can reach.

    The new instructions get edges among themselves and into the original
    graph (never out of it) and random attachments.
    """
    junk = [f"x{n}" for n in range(1, k + 1)]
    while any(j in m.instruction_index for j in junk):
        junk = [j + "_" for j in junk]
    edges = list(m.instruction_edges)
    for j in junk:
        for t in rng.sample(junk + list(m.instructions), 2):
            if not any(e.source == j and e.target == t for e in edges):
                edges.append(InstructionEdge(j, t, rng.choice((1, 2))))
    atts = list(m.attachments)
    for j in junk:
        if m.channels and rng.random() < 0.7:
            atts.append(Attachment(j, rng.choice(m.channels).key))
    return ensure_valid(replace(
        m,
        instructions=list(m.instructions) + junk,
        instruction_edges=edges,
        attachments=atts,
    ))
