"""The ``psi`` command.

Exit status: 0 success, 1 negative verdict or failed conformance, 2 usage or
parse error, 3 a depth or state bound was hit.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from typing import Any, Sequence

from .bisim import BisimilarUpToBasis, GameConfig, Inconclusive, NotBisimilar, bisimilar, context_bisimilar
from .demos import run_demo
from .encodings import encode_pi, encode_pif, parse_pi, parse_pif, prenormalise_pif
from .errors import DepthExceeded, GoldenMismatch, PsiError
from .generate import random_agents
from .instance_api import check_requisites, check_substitution_laws
from .instances import REGISTRY, get_instance
from .semantics import (
    CandidateObjects,
    ClosedSystem,
    SymbolicOnly,
    build_lts,
    run_trace,
    transitions,
)
from .syntax import parse_agent, print_agent

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_DEPTH = 0, 1, 2, 3


class _Usage(Exception):
    pass


# ---------------------------------------------------------------- output


def _color_enabled() -> bool:
    flag = os.environ.get("PSI_COLOR", "").strip().lower()
    if flag in ("0", "no", "off", "never", "false"):
        return False
    return sys.stdout.isatty() or flag in ("1", "yes", "on", "always", "true")


def _paint(text: str, code: str) -> str:
    return f"\033[{code}m{text}\033[0m" if _color_enabled() else text


def _emit(text: str) -> None:
    if text:
        print(text)


# ---------------------------------------------------------------- inputs


def _read_source(arg: str) -> str:
    """``-`` reads stdin, ``@path`` reads a file, anything else is inline text."""
    if arg == "-":
        return sys.stdin.read()
    if arg.startswith("@"):
        try:
            with open(arg[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise _Usage(f"cannot read {arg[1:]}: {exc.strerror}") from None
    return arg


def _instance(args):
    try:
        return get_instance(args.instance)
    except KeyError as exc:
        raise _Usage(str(exc.args[0])) from None


def _env(args, inst):
    if args.env is None:
        return inst.unit
    return inst.parse_assertion(_read_source(args.env))


def _policy(args, inst, default: str):
    text = args.policy or default
    if text == "closed":
        return ClosedSystem()
    if text == "symbolic":
        return SymbolicOnly()
    if text.startswith("candidates="):
        body = _read_source("@" + text.split("=", 1)[1])
        objects = tuple(inst.parse_term(line.strip()) for line in body.splitlines()
                        if line.strip() and not line.strip().startswith("#"))
        return CandidateObjects(objects)
    raise _Usage(f"unknown policy {text!r}; use closed, symbolic or candidates=<file>")


_PLACEHOLDER = re.compile(r"(?:(?<=^)|(?<=[|(.:!\]]))(\s*)([A-Z][A-Za-z0-9_']*)(?=\s*(?:\||\)|\[\]|$))")


def _placeholders(text: str) -> list[str]:
    return sorted({m.group(2) for m in _PLACEHOLDER.finditer(text)})


def _instantiate(text: str, values: dict) -> str:
    return _PLACEHOLDER.sub(lambda m: f"{m.group(1)}({values[m.group(2)]})", text)


def _agent(text: str, inst):
    return parse_agent(_read_source(text), inst)


# ---------------------------------------------------------------- subcommands


def cmd_parse(args) -> int:
    inst = _instance(args)
    agent = _agent(args.agent, inst)
    if args.format == "json":
        _emit(json.dumps({"agent": print_agent(agent, inst), "canonical": print_agent(agent.canonical(), inst)}))
    else:
        _emit(print_agent(agent.canonical(), inst))
    return EXIT_OK


def cmd_step(args) -> int:
    inst = _instance(args)
    env = _env(args, inst)
    agent = _agent(args.agent, inst)
    found = transitions(env, agent, inst, _policy(args, inst, "symbolic"), args.rep_bound, strict=args.strict)
    if args.format == "json":
        _emit(json.dumps([{"label": t.label(inst), "derivative": print_agent(t.derivative, inst)} for t in found],
                         indent=2))
    else:
        _emit("\n".join(f"{_paint(t.label(inst), '1')}  {print_agent(t.derivative, inst)}" for t in found))
    return EXIT_OK


def cmd_trace(args) -> int:
    inst = _instance(args)
    trace = run_trace(_env(args, inst), _agent(args.agent, inst), inst, args.steps,
                      _policy(args, inst, "closed"), args.scheduler, args.seed, args.rep_bound)
    if args.format == "json":
        _emit(json.dumps({
            "start": print_agent(trace.start, inst),
            "steps": [{"label": t.label(inst), "derivative": print_agent(t.derivative, inst)} for t in trace.steps],
            "quiescent": trace.quiescent,
        }, indent=2))
    else:
        _emit(trace.show(inst))
    return EXIT_OK


def cmd_lts(args) -> int:
    inst = _instance(args)
    lts = build_lts(_env(args, inst), _agent(args.agent, inst), inst, args.max_states, args.max_depth,
                    _policy(args, inst, "closed"), args.rep_bound)
    if args.format == "dot":
        _emit(lts.to_dot(inst))
    elif args.format == "json":
        _emit(lts.to_json(inst))
    else:
        lines = [f"s{i}: {print_agent(s, inst)}" for i, s in enumerate(lts.states)]
        lines += [f"s{s} --{l}--> s{d}" for s, l, d in lts.edges]
        if lts.truncated:
            lines.append("(truncated)")
        _emit("\n".join(lines))
    return EXIT_DEPTH if lts.truncated else EXIT_OK


def _verdict_dict(verdict, inst) -> dict:
    out: dict = {"verdict": type(verdict).__name__, "states": verdict.states}
    if isinstance(verdict, BisimilarUpToBasis):
        out["exact"] = verdict.exact
    elif isinstance(verdict, NotBisimilar):
        out["witness"] = verdict.witness.to_dict(inst)
    elif isinstance(verdict, Inconclusive):
        out["reason"] = str(verdict.reason)
    return out


def cmd_bisim(args) -> int:
    inst = _instance(args)
    cfg = GameConfig(max_depth=args.max_depth, max_states=args.max_states, rep_bound=args.rep_bound)
    left_text, right_text = _read_source(args.left), _read_source(args.right)
    env = _env(args, inst)
    holes = sorted(set(_placeholders(left_text)) | set(_placeholders(right_text)))
    runs: list[tuple[dict, Any, Any]] = []
    if holes and not _parses(left_text, inst) | _parses(right_text, inst):
        rng = random.Random(args.seed)
        for _ in range(args.samples):
            values = {h: print_agent(a, inst) for h, a in zip(holes, random_agents(rng, inst, len(holes)))}
            runs.append((values, parse_agent(_instantiate(left_text, values), inst),
                         parse_agent(_instantiate(right_text, values), inst)))
    else:
        runs.append(({}, parse_agent(left_text, inst), parse_agent(right_text, inst)))

    results = []
    for values, left, right in runs:
        if args.contextual:
            verdict = context_bisimilar(left, right, inst, cfg)
        else:
            verdict = bisimilar(env, left, right, inst, cfg)
        results.append((values, verdict))
        if not isinstance(verdict, BisimilarUpToBasis):
            break
    values, last = results[-1]
    if isinstance(last, BisimilarUpToBasis):
        verdict = BisimilarUpToBasis(all(v.exact for _, v in results), sum(v.states for _, v in results))
    else:
        verdict = last

    if args.format == "json":
        body = _verdict_dict(verdict, inst)
        if values:
            body["placeholders"] = values
        body["instances_checked"] = len(results)
        _emit(json.dumps(body, indent=2))
    else:
        colour = "32" if verdict.positive else ("31" if isinstance(verdict, NotBisimilar) else "33")
        lines = [_paint(verdict.describe(), colour)]
        if holes and values:
            lines.append(f"placeholders instantiated {len(results)} time(s); last: "
                         + ", ".join(f"{k} := {v}" for k, v in values.items()))
        if isinstance(verdict, NotBisimilar):
            lines.append(verdict.witness.to_json(inst))
        _emit("\n".join(lines))
    if isinstance(verdict, NotBisimilar):
        return EXIT_NEGATIVE
    if isinstance(verdict, Inconclusive):
        return EXIT_DEPTH
    return EXIT_OK


def _parses(text: str, inst) -> bool:
    try:
        parse_agent(text, inst)
        return True
    except PsiError:
        return False


def cmd_conform(args) -> int:
    names = sorted(REGISTRY) if args.instance == "all" else [args.instance]
    reports = []
    for name in names:
        try:
            inst = get_instance(name)
        except KeyError as exc:
            raise _Usage(str(exc.args[0])) from None
        reports.append(check_requisites(inst, trials=args.trials, seed=args.seed))
        reports.append(check_substitution_laws(inst, trials=args.trials, seed=args.seed + 1))
    if args.format == "json":
        _emit(json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        lines = []
        for r in reports:
            status = _paint("PASS", "32") if r.passed else _paint("FAIL", "31")
            lines.append(f"{status} {r.subject}")
            for res in r.results:
                mark = "ok" if res.passed else ("info" if res.informational else "FAIL")
                lines.append(f"  [{mark}] {res.law} ({res.trials} trials)")
        _emit("\n".join(lines))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NEGATIVE


def cmd_encode(args) -> int:

    source = _read_source(args.source)
    if args.language == "pi":
        agent, inst = encode_pi(parse_pi(source)), get_instance("pi")
    else:
        term = parse_pif(source)
        agent, inst = encode_pif(prenormalise_pif(term) if args.prenormalise else term), get_instance("fusion")
    if args.format == "json":
        _emit(json.dumps({"instance": inst.name, "agent": print_agent(agent, inst)}))
    else:
        _emit(print_agent(agent, inst))
    return EXIT_OK


def cmd_demo(args) -> int:

    try:
        report = run_demo(args.name)
    except KeyError as exc:
        raise _Usage(str(exc.args[0])) from None
    _emit(report.to_json() if args.format == "json" else report.show())
    return EXIT_OK if report.passed else EXIT_NEGATIVE


# ---------------------------------------------------------------- argument parsing


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("bounds must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", default="pi", help=f"one of {', '.join(sorted(REGISTRY))}")
    common.add_argument("--env", help="environment assertion (default: the unit)")
    common.add_argument("--max-depth", type=_positive, default=32)
    common.add_argument("--rep-bound", type=_positive, default=8)
    common.add_argument("--max-states", type=_positive, default=10_000)
    common.add_argument("--policy", help="closed | symbolic | candidates=<file>")
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="psi", description="Explore and compare psi-calculus agents.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="print the alpha-canonical form of an agent")
    p.add_argument("agent", help="agent text, @file or -")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("step", parents=[common], help="list the transitions of an agent")
    p.add_argument("agent")
    p.add_argument("--strict", action="store_true", help="fail when the replication bound is reached")
    p.set_defaults(run=cmd_step)

    p = sub.add_parser("trace", parents=[common], help="follow silent transitions")
    p.add_argument("agent")
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--scheduler", choices=("first", "random"), default="first")
    p.set_defaults(run=cmd_trace)

    p = sub.add_parser("lts", parents=[common], help="explore and export the transition system")
    p.add_argument("agent")
    p.set_defaults(run=cmd_lts)

    p = sub.add_parser("bisim", parents=[common], help="decide bisimilarity of two agents")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--contextual", action="store_true", help="play the context-bisimulation game")
    p.add_argument("--samples", type=_positive, default=5,
                   help="instantiations tried for capitalised agent placeholders")
    p.set_defaults(run=cmd_bisim)

    p = sub.add_parser("conform", parents=[common], help="property-test an instance (or 'all')")
    p.add_argument("--trials", type=_positive, default=1000)
    p.set_defaults(run=cmd_conform)

    p = sub.add_parser("encode", parents=[common], help="translate pi or pi-F source into psi syntax")
    p.add_argument("language", choices=("pi", "pif"))
    p.add_argument("source")
    p.add_argument("--prenormalise", action="store_true", help="float scoped pi-F data out first")
    p.set_defaults(run=cmd_encode)

    p = sub.add_parser("demo", parents=[common], help="replay a worked example against its golden trace")
    p.add_argument("name", help="dh, fhss, services, fusion, hash, sign or salt")
    p.set_defaults(run=cmd_demo)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.run(args)
    except DepthExceeded as exc:
        print(f"psi: {exc}", file=sys.stderr)
        return EXIT_DEPTH
    except GoldenMismatch as exc:
        print(f"psi: golden mismatch: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (_Usage, PsiError, ValueError) as exc:
        print(f"psi: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
