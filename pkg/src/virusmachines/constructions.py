"""Builders for the machines of the normal-form results, plus their predicted sets.

Every builder returns a validated machine.  Where the original drawing of a
machine is not available, the construction is pinned by its worked trace
and the ``note`` field says so.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import ENV, VirusMachine, ensure_valid, make_machine


class ConstructionError(ValueError):
    pass


def _ids(prefix: str, n: int, start: int = 1) -> list[str]:
    return [f"{prefix}{k}" for k in range(start, start + n)]


def build_example() -> VirusMachine:
    """The degree-(2, 4) worked example generating {2, 4}."""
    return ensure_valid(make_machine(
        hosts=[("h1", 2), ("h2", 2)],
        channels=[("h1", ENV, 1), ("h2", "h1", 1), ("h2", ENV, 2)],
        instructions=["i1", "i2", "i3", "i4"],
        edges=[("i1", "i1", 2), ("i1", "i2", 1), ("i2", "i3", 1), ("i2", "i4", 1)],
        attachments={"i1": ("h1", ENV), "i2": ("h2", "h1"), "i3": ("h2", ENV)},
        name="example",
        note="reconstructed from the worked computation C0..C5",
    ))


def build_singleton(v: int) -> VirusMachine:
    """One host, one virus, one instruction: generates {v}.

    For ``v == 0`` the channel keeps weight 1 but the instruction is left
    unattached, so the machine halts after one step having emitted nothing.
    """
    if v < 0:
        raise ConstructionError("v must be >= 0")
    return ensure_valid(make_machine(
        hosts=[("h1", 1)],
        channels=[("h1", ENV, max(v, 1))],
        instructions=["i1"],
        attachments={"i1": ("h1", ENV)} if v > 0 else {},
        name=f"singleton_{v}",
    ))


def build_nat() -> VirusMachine:
    """Two hosts, four instructions, at most two viruses: generates N \\ {0}."""
    return ensure_valid(make_machine(
        hosts=[("h1", 1), ("h2", 0)],
        channels=[("h1", "h2", 2), ("h2", ENV, 1), ("h2", "h1", 1)],
        instructions=["i1", "i2", "i3", "i4"],
        edges=[("i1", "i2"), ("i2", "i3"), ("i3", "i1"), ("i3", "i4")],
        attachments={"i1": ("h1", "h2"), "i2": ("h2", "h1"), "i3": ("h2", ENV)},
        name="nat",
    ))


def _check_finite(F: Iterable[int]) -> list[int]:
    F = sorted(set(F))
    if not F:
        raise ConstructionError("F must be nonempty")
    if F[0] <= 0:
        raise ConstructionError("elements of F must be positive")
    return F


def build_finite_set(F: Iterable[int]) -> VirusMachine:
    """Two hosts holding at most two viruses; generates the finite set ``F``.

    Instruction ``i_{2x+1}`` emits one virus from whichever host holds the
    pair at round ``x``; ``i_{2x+2}`` doubles the remaining virus into the
    other host.  After ``i_{2m}`` for ``m`` in ``F`` the computation may jump
    to the unattached terminal instruction, halting after ``2m + 1`` steps
    with ``m`` emitted.
    """
    F = _check_finite(F)
    top = F[-1]
    chain = _ids("i", 2 * top)
    term = f"i{2 * top + 1}"
    edges = [(a, b) for a, b in zip(chain, chain[1:])]
    edges += [(f"i{2 * m}", term) for m in F]
    att = {}
    for x in range(top):
        full, other = ("h1", "h2") if x % 2 == 0 else ("h2", "h1")
        att[f"i{2 * x + 1}"] = (full, ENV)
        att[f"i{2 * x + 2}"] = (full, other)
    return ensure_valid(make_machine(
        hosts=[("h1", 2), ("h2", 0)],
        channels=[("h1", "h2", 2), ("h1", ENV, 1), ("h2", "h1", 2), ("h2", ENV, 1)],
        instructions=chain + [term],
        edges=edges,
        attachments=att,
        name="finite_" + "_".join(map(str, F)),
        note="exit edges leave even instructions towards an extra unattached terminal",
    ))


def build_finite_one_host(F: Iterable[int]) -> VirusMachine:
    """Single host with ``max(F)`` viruses draining one at a time."""
    F = _check_finite(F)
    top = F[-1]
    chain = _ids("i", top)
    term = f"i{top + 1}"
    edges = [(a, b) for a, b in zip(chain, chain[1:])] + [(f"i{m}", term) for m in F]
    return ensure_valid(make_machine(
        hosts=[("h1", top)],
        channels=[("h1", ENV, 1)],
        instructions=chain + [term],
        edges=edges,
        attachments={i: ("h1", ENV) for i in chain},
        name="finite_one_host_" + "_".join(map(str, F)),
        note="reconstruction; one host, tree host and instruction graphs",
    ))


def build_finite_one_virus(F: Iterable[int]) -> VirusMachine:
    """``max(F)`` hosts with one virus each, one private channel per instruction."""
    F = _check_finite(F)
    top = F[-1]
    hosts = _ids("h", top)
    chain = _ids("i", top)
    term = f"i{top + 1}"
    edges = [(a, b) for a, b in zip(chain, chain[1:])] + [(f"i{m}", term) for m in F]
    return ensure_valid(make_machine(
        hosts=[(h, 1) for h in hosts],
        channels=[(h, ENV, 1) for h in hosts],
        instructions=chain + [term],
        edges=edges,
        attachments={i: (h, ENV) for i, h in zip(chain, hosts)},
        name="finite_one_virus_" + "_".join(map(str, F)),
        note="reconstruction; one virus per host, each channel used by one instruction",
    ))


def build_lin_fin(x: int, n: int, N: int) -> VirusMachine:
    """Degree (2, 2) machine generating ``{x + n*i : 1 <= i <= N}``."""
    if n < 1 or N < 1 or x < 0:
        raise ConstructionError("need n >= 1, N >= 1, x >= 0")
    channels = [("h1", ENV, n)]
    att = {"i1": ("h1", ENV)}
    if x > 0:
        channels.append(("h2", ENV, x))
        att["i2"] = ("h2", ENV)
    return ensure_valid(make_machine(
        hosts=[("h1", N), ("h2", 1)],
        channels=channels,
        instructions=["i1", "i2"],
        edges=[("i1", "i1"), ("i1", "i2")],
        attachments=att,
        name=f"lin_{x}_{n}_{N}",
        note="reconstruction from the worked trace",
    ))


def _comb(w1, w2, r, N1, N2, edges, name) -> VirusMachine:
    if min(w1, w2, N1, N2) < 1 or r < 0:
        raise ConstructionError("need w1, w2, N1, N2 >= 1 and r >= 0")
    channels = [("h1", ENV, w1), ("h2", ENV, w2)]
    att = {"i1": ("h1", ENV), "i2": ("h2", ENV)}
    if r > 0:
        channels.append(("h3", ENV, r))
        att["i3"] = ("h3", ENV)
    return ensure_valid(make_machine(
        hosts=[("h1", N1), ("h2", N2), ("h3", 1)],
        channels=channels,
        instructions=["i1", "i2", "i3"],
        edges=edges,
        attachments=att,
        name=f"{name}_{w1}_{w2}_{r}_{N1}_{N2}",
        note="reconstruction from the proof's description",
    ))


def build_comb_a(w1: int, w2: int, r: int, N1: int, N2: int) -> VirusMachine:
    """Two self-looping emitters in sequence, then a single ``r`` emission."""
    return _comb(w1, w2, r, N1, N2, [("i1", "i1"), ("i1", "i2"), ("i2", "i2"), ("i2", "i3")], "comb_a")


def build_comb_b(w1: int, w2: int, r: int, N1: int, N2: int) -> VirusMachine:
    """The two emitters alternate in a loop of size 2 before the ``r`` emission."""
    return _comb(w1, w2, r, N1, N2, [("i1", "i2"), ("i2", "i1"), ("i2", "i3")], "comb_b")


def _arith_block(n: int, r: int, prefix: str = "i"):
    ids = [f"{prefix}{k}" for k in range(1, 3 * n + 3 * r + 1)]
    edges = [(a, b) for a, b in zip(ids, ids[1:])] + [(ids[3 * n - 1], ids[0])]
    att = {}
    for j, i in enumerate(ids, start=1):
        att[i] = {1: ("h1", "h2"), 2: ("h2", ENV), 0: ("h2", "h1")}[j % 3]
    return ids, edges, att


_ARITH_CHANNELS = [("h1", "h2", 2), ("h2", ENV, 1), ("h2", "h1", 1)]


def build_arith(n: int, r: int) -> VirusMachine:
    """Degree (2, 3n + 3r) machine generating ``{n*i + r : i >= 1}``.

    Every three instructions move the single virus h1 -> h2 (doubled), emit
    one copy and return the other to h1.  The first ``3n`` instructions form
    a loop; leaving it runs ``3r`` more instructions and halts.
    """
    if n < 1 or r < 1:
        raise ConstructionError("need n, r >= 1")
    ids, edges, att = _arith_block(n, r)
    return ensure_valid(make_machine(
        hosts=[("h1", 1), ("h2", 0)],
        channels=_ARITH_CHANNELS,
        instructions=ids,
        edges=edges,
        attachments=att,
        name=f"arith_{n}_{r}",
        note="emission channel moved to h2 and initial viruses set to (1, 0)",
    ))


def build_union(parts: Sequence[tuple[int, int]]) -> VirusMachine:
    """One arithmetic block per ``(n, r)`` part, entered from a shared
    unattached instruction ``i0`` that picks a block nondeterministically."""
    parts = [_as_arith(p) for p in parts]
    if len(parts) < 2:
        raise ConstructionError("a union needs at least two parts")
    instructions = ["i0"]
    edges = []
    att = {}
    for k, (n, r) in enumerate(parts, start=1):
        ids, es, a = _arith_block(n, r, prefix=f"p{k}_i")
        instructions += ids
        edges.append(("i0", ids[0]))
        edges += es
        att.update(a)
    return ensure_valid(make_machine(
        hosts=[("h1", 1), ("h2", 0)],
        channels=_ARITH_CHANNELS,
        instructions=instructions,
        edges=edges,
        attachments=att,
        name="union_" + "_".join(f"{n}x{r}" for n, r in parts),
        note="reconstruction: arithmetic blocks sharing the host graph",
    ))


def _as_arith(p) -> tuple[int, int]:
    if isinstance(p, SetSpec):
        if p.kind != "arith":
            raise ConstructionError("union parts must be arithmetic progressions")
        p = p.params
    n, r = p
    if n < 1 or r < 1:
        raise ConstructionError("need n, r >= 1")
    return (n, r)


@dataclass(frozen=True)
class SetSpec:
    """A set family member: ``kind`` names the family, ``params`` its parameters.

    kinds: singleton (v,), finite (m_1, ...), nat (), lin (x, n, N),
    comb_a / comb_b (w1, w2, r, N1, N2), arith (n, r), union ((n, r), ...).
    """

    kind: str
    params: tuple = ()

    @classmethod
    def singleton(cls, v):
        return cls("singleton", (v,))

    @classmethod
    def finite(cls, F):
        return cls("finite", tuple(sorted(set(F))))

    @classmethod
    def nat(cls):
        return cls("nat")

    @classmethod
    def lin(cls, x, n, N):
        return cls("lin", (x, n, N))

    @classmethod
    def comb_a(cls, w1, w2, r, N1, N2):
        return cls("comb_a", (w1, w2, r, N1, N2))

    @classmethod
    def comb_b(cls, w1, w2, r, N1, N2):
        return cls("comb_b", (w1, w2, r, N1, N2))

    @classmethod
    def arith(cls, n, r):
        return cls("arith", (n, r))

    @classmethod
    def union(cls, *parts):
        return cls("union", tuple(_as_arith(p) for p in parts))


def comb_b_value(w1, w2, r, N1, N2, x, y) -> Optional[int]:
    """The piecewise function defining the loop-of-size-2 family.

    Returns ``None`` outside the three cases.
    """
    low = min(N1, N2)
    if x < low:
        return (w1 + w2) * x + r
    if x == N1 and N1 < N2:
        return (w1 + w2) * N1 + w2 * y + r
    if x == N2 and N2 < N1:
        return (w1 + w2) * N2 + w1 * y + r
    return None


def predicted_set(spec: SetSpec, cap: Optional[int] = None) -> tuple[int, ...]:
    """Closed-form set for ``spec``, keeping only values ``<= cap``.

    Infinite families need a cap.
    """
    kind, p = spec.kind, spec.params
    if kind in ("nat", "arith", "union") and cap is None:
        raise ValueError(f"{kind} is infinite; a cap is required")
    if kind == "singleton":
        vals = {p[0]}
    elif kind == "finite":
        vals = set(p)
    elif kind == "nat":
        vals = set(range(1, cap + 1))
    elif kind == "lin":
        x, n, N = p
        vals = {x + n * i for i in range(1, N + 1)}
    elif kind == "comb_a":
        w1, w2, r, N1, N2 = p
        vals = {w1 * x + w2 * y + r for x in range(1, N1 + 1) for y in range(1, N2 + 1)}
    elif kind == "comb_b":
        w1, w2, r, N1, N2 = p
        low = min(N1, N2)
        # the first case does not depend on y, so it is kept even when the
        # y-range 1..|N2 - N1| is empty
        vals = {comb_b_value(w1, w2, r, N1, N2, x, 1) for x in range(1, low)}
        vals |= {
            comb_b_value(w1, w2, r, N1, N2, low, y)
            for y in range(1, abs(N2 - N1) + 1)
        }
    elif kind == "arith":
        n, r = p
        vals = set(range(n + r, cap + 1, n))
    elif kind == "union":
        vals = set()
        for n, r in p:
            vals |= set(range(n + r, cap + 1, n))
    else:
        raise ValueError(f"unknown set kind {kind!r}")
    if cap is not None:
        vals = {v for v in vals if v <= cap}
    return tuple(sorted(vals))


def build(spec: SetSpec) -> VirusMachine:
    """Machine generating the set described by ``spec``."""
    kind, p = spec.kind, spec.params
    builders = {
        "singleton": lambda: build_singleton(*p),
        "finite": lambda: build_finite_set(p),
        "nat": build_nat,
        "lin": lambda: build_lin_fin(*p),
        "comb_a": lambda: build_comb_a(*p),
        "comb_b": lambda: build_comb_b(*p),
        "arith": lambda: build_arith(*p),
        "union": lambda: build_union(p),
    }
    if kind not in builders:
        raise ConstructionError(f"unknown set kind {kind!r}")
    return builders[kind]()
