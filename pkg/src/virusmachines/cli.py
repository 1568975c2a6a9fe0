"""Command-line front end: ``virusmachine <command> ...``.

Exit status is 0 on success, 1 on domain errors (bad machine, refused
construction, exhausted script, failed reproduction) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import constructions as C
from .analysis import classify, ingredient_profile
from .core import InvalidMachineError, validate_machine
from .io import MachineFormatError, export_dot, parse_machine, serialize_machine
from .semantics import (
    ExplorationBounds,
    RandomPolicy,
    ScriptedPolicy,
    ScriptExhaustedError,
    enumerate_generated_set,
    run_trace,
)

DEFAULT_MAX_STEPS = 10_000
DEFAULT_MAX_FRONTIER = 1_000_000


class DomainError(Exception):
    pass


def _read_machine(path):
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as err:
            raise DomainError(f"cannot read {path}: {err.strerror}") from None
    return parse_machine(text)


def _write(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(args, payload: dict, text: str):
    if args.format == "json":
        _write(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _write(text if text.endswith("\n") else text + "\n", args.out)


def _bounds(args) -> ExplorationBounds:
    spec = {"max_steps": args.max_steps, "max_total_viruses": None, "max_frontier": None}
    env_cap = os.environ.get("VM_MAX_FRONTIER")
    spec["max_frontier"] = int(env_cap) if env_cap else DEFAULT_MAX_FRONTIER
    if args.bounds:
        for item in args.bounds.split(","):
            key, _, val = item.partition("=")
            key = key.strip().replace("-", "_")
            if key not in spec or not val.strip().isdigit():
                raise argparse.ArgumentTypeError(f"bad --bounds entry {item!r}")
            spec[key] = int(val)
    return ExplorationBounds(**spec)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _arith_part(text: str) -> tuple[int, int]:
    n, _, r = text.replace(",", "x").partition("x")
    return (int(n), int(r))


BUILDERS = {
    "example": (0, lambda a: C.build_example()),
    "singleton": (1, lambda a: C.build_singleton(int(a[0]))),
    "nat": (0, lambda a: C.build_nat()),
    "finite": (1, lambda a: C.build_finite_set(_int_list(a[0]))),
    "one-host": (1, lambda a: C.build_finite_one_host(_int_list(a[0]))),
    "one-virus": (1, lambda a: C.build_finite_one_virus(_int_list(a[0]))),
    "lin": (3, lambda a: C.build_lin_fin(*map(int, a))),
    "comb-a": (5, lambda a: C.build_comb_a(*map(int, a))),
    "comb-b": (5, lambda a: C.build_comb_b(*map(int, a))),
    "arith": (2, lambda a: C.build_arith(*map(int, a))),
    "union": (None, lambda a: C.build_union([_arith_part(x) for x in a])),
}


def cmd_validate(args):
    m = _read_machine(args.machine)
    report = validate_machine(m)
    payload = {"valid": report.ok, "violations": [str(v) for v in report.violations]}
    _emit(args, payload, "valid" if report.ok else "\n".join(payload["violations"]))
    return 0


def cmd_run(args):
    m = _read_machine(args.machine)
    if args.script is not None:
        policy = ScriptedPolicy(_int_list(args.script))
    else:
        policy = RandomPolicy(args.seed)
    trace = run_trace(m, policy, args.max_steps)
    lines = [str(c) for c in trace.configurations]
    if trace.halted:
        lines.append(f"halted after {trace.steps} steps, emitted {trace.emitted}")
    else:
        lines.append(f"stopped after {trace.steps} steps without halting")
    payload = {
        "configurations": [list(c.as_tuple()) for c in trace.configurations],
        "choices": [{"step": p.step_index, "ties": list(p.ties), "chosen": p.chosen} for p in trace.choices],
        "halted": trace.halted,
        "emitted": trace.emitted,
    }
    _emit(args, payload, "\n".join(lines))
    return 0


def _warn_truncated(rep):
    if not rep.exact:
        print(
            f"warning: exploration truncated by bounds ({rep.truncated_branch_count} branches cut)",
            file=sys.stderr,
        )


def cmd_enumerate(args):
    m = _read_machine(args.machine)
    rep = enumerate_generated_set(m, _bounds(args))
    _warn_truncated(rep)
    _emit(args, rep.to_dict(), str(rep))
    return 0


def cmd_analyze(args):
    m = _read_machine(args.machine)
    rep = enumerate_generated_set(m, _bounds(args))
    _warn_truncated(rep)
    prof = ingredient_profile(m, rep)
    cls = classify(m, prof)
    r = f"{prof.nvh_r}{'' if prof.nvh_exact else ' (observed, truncated)'}"
    lines = [
        f"profile: β={'T' if prof.beta else 'F'} p={prof.hosts_p} q={prof.instructions_q} r={r} "
        f"s={prof.wc_s} t={prof.outd_t} u={prof.alpha_host_u} v={prof.alpha_inst_v}",
        f"generated: {rep}",
    ]
    lines += [f"{v.verdict:18s} {v.family:18s} [{v.rule}] {v.justification}" for v in cls.verdicts]
    payload = {"profile": prof.to_dict(), "generated": rep.to_dict(), "classification": cls.to_list()}
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_build(args):
    arity, fn = BUILDERS[args.kind]
    if arity is not None and len(args.params) != arity:
        raise argparse.ArgumentTypeError(f"{args.kind} takes {arity} parameter(s), got {len(args.params)}")
    try:
        m = fn(args.params)
    except ValueError as err:
        raise DomainError(str(err)) from None
    _write(serialize_machine(m), args.out)
    return 0


def cmd_export_dot(args):
    m = _read_machine(args.machine)
    _write(export_dot(m, args.layer), args.out)
    return 0


def cmd_reproduce(args):
    from .reproduce import run_all, table_rows

    results = run_all()
    rows = table_rows()
    if args.format == "json":
        payload = {
            "criteria": [
                {"number": r.number, "title": r.title, "passed": r.passed, "details": r.details}
                for r in results
            ],
            "table": rows,
        }
        _write(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        lines = []
        for r in results:
            lines.append(r.line())
            lines += [f"      {d}" for d in r.details]
        lines.append("")
        head = f"{'machine':24s} {'h':>3} {'i':>3} {'nv':>4} {'wc':>4} {'outd':>4} {'a_h':>3} {'a_i':>3} {'b':>2}  generated"
        lines.append(head)
        lines.append("-" * len(head))
        for row in rows:
            nv = f"{row['nvh']}{'' if row['nvh_exact'] else '+'}"
            lines.append(
                f"{row['machine']:24s} {row['h']:>3} {row['i']:>3} {nv:>4} {row['wc']:>4} {row['outd']:>4} "
                f"{row['alpha_host']:>3} {row['alpha_inst']:>3} {row['beta']:>2}  {row['generated']}"
            )
        _write("\n".join(lines) + "\n", args.out)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="virusmachine", description="Virus machine simulation and analysis.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, machine=True, steps=False):
        if machine:
            sp.add_argument("--machine", "-m", help="machine document (.vm.json); '-' or omitted reads stdin")
        if steps:
            sp.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
            sp.add_argument("--bounds", help="comma list of max_steps=N, max_total_viruses=N, max_frontier=N")
        sp.add_argument("--out", "-o", help="write output here instead of stdout")
        sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("validate", help="check structural constraints")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("run", help="execute one computation")
    common(sp, steps=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--script", help="comma list of choice indices, one per tie")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("enumerate", help="bounded generated set")
    common(sp, steps=True)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("analyze", help="ingredient profile and classification")
    common(sp, steps=True)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("build", help="write a machine document for a construction")
    sp.add_argument("kind", choices=sorted(BUILDERS))
    sp.add_argument("params", nargs="*")
    sp.add_argument("--out", "-o")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("export-dot", help="DOT rendering of the machine graphs")
    common(sp)
    sp.add_argument("--layer", choices=("host", "instruction", "combined"), default="combined")
    sp.set_defaults(func=cmd_export_dot)

    sp = sub.add_parser("reproduce", help="run the fixture suite and print the resource table")
    sp.add_argument("--out", "-o")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as err:
        parser.print_usage(sys.stderr)
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (DomainError, InvalidMachineError, MachineFormatError, ScriptExhaustedError, IndexError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
