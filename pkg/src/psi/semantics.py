"""Labelled transitions ``Psi |> P --alpha--> P'`` and things built on them.

The engine derives transitions bottom-up over the agent.  Before each call
the agent is alpha-converted so that every binder is distinct and fresh for
the environment; frame assertions of parallel components can then be used
directly as environments, and the freshness side conditions of the rules
reduce to checks on the label.

Input is the infinitely branching rule.  Below the top level an input is
kept as a schema (subject, pattern variables, pattern, continuation, and the
names its object must avoid); ``Com`` instantiates schemas from the matching
output, and at the top level the input policy decides what to report.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Iterable, Sequence

from .errors import DepthExceeded
from .frames import Frame
from .nominal import Name, NameSupply, Permutation, apply_permutation, support
from .syntax import (
    Agent,
    Assert,
    Case,
    Input,
    Nil,
    Output,
    Par,
    Rep,
    Res,
    all_names,
    distinct_binders,
    frame_of,
    guarded,
    print_agent,
    rename_binders,
    restrict,
    substitute_agent,
)
from .terms import Fn, print_term

if TYPE_CHECKING:
    from .instance_api import Instance

DEFAULT_REP_BOUND = 8


# ---------------------------------------------------------------- actions


@dataclass(frozen=True)
class OutputAct:
    subject: Any
    bound: tuple
    obj: Any

    kind = "out"

    def __support__(self) -> frozenset:
        return support(self.subject) | support(self.obj)

    def __permute__(self, perm):
        return OutputAct(apply_permutation(perm, self.subject), tuple(perm(b) for b in self.bound),
                         apply_permutation(perm, self.obj))


@dataclass(frozen=True)
class InputAct:
    subject: Any
    obj: Any

    kind = "in"

    def __support__(self) -> frozenset:
        return support(self.subject) | support(self.obj)

    def __permute__(self, perm):
        return InputAct(apply_permutation(perm, self.subject), apply_permutation(perm, self.obj))


@dataclass(frozen=True)
class InputSchema:
    """An unlabelled input: any object matching ``pattern`` may be received."""

    subject: Any
    binders: tuple
    pattern: Any

    kind = "in?"

    def __support__(self) -> frozenset:
        return support(self.subject) | (support(self.pattern) - frozenset(self.binders))

    def __permute__(self, perm):
        return InputSchema(apply_permutation(perm, self.subject), tuple(perm(b) for b in self.binders),
                           apply_permutation(perm, self.pattern))


@dataclass(frozen=True)
class TauAct:
    kind = "tau"

    def __support__(self) -> frozenset:
        return frozenset()

    def __permute__(self, perm):
        return self


TAU = TauAct()


def bound_names_of(action: Any) -> tuple:
    return action.bound if isinstance(action, OutputAct) else ()


def print_action(action: Any, inst: "Instance" | None = None) -> str:
    show = inst.print_term if inst is not None else print_term
    if isinstance(action, OutputAct):
        scope = f"(new {','.join(action.bound)})" if action.bound else ""
        return f"{show(action.subject)}!{scope}{show(action.obj)}"
    if isinstance(action, InputAct):
        return f"{show(action.subject)}?{show(action.obj)}"
    if isinstance(action, InputSchema):
        return f"{show(action.subject)}?(\\{','.join(action.binders)}){show(action.pattern)}"
    return "tau"


@dataclass(frozen=True)
class Residual:
    """An action with its derivative; output-bound names bind into both."""

    action: Any
    derivative: Agent

    def canonical(self) -> "Residual":
        action, deriv = self.action, self.derivative
        bound = bound_names_of(action)
        if bound:
            free = (support(action.obj) | deriv.free_names) - frozenset(bound)
            taken = set(free) | support(action.subject) | set(bound)
            fresh = []
            i = 0
            while len(fresh) < len(bound):
                cand = f"_b{i}"
                if cand not in taken:
                    fresh.append(cand)
                i += 1
            perm = Permutation(tuple(zip(bound, fresh)))
            action = apply_permutation(perm, action)
            deriv = apply_permutation(perm, deriv)
        return Residual(action, deriv.canonical())


@dataclass(frozen=True)
class Transition:
    env: Any
    source: Agent
    residual: Residual

    @property
    def action(self) -> Any:
        return self.residual.action

    @property
    def derivative(self) -> Agent:
        return self.residual.derivative

    def label(self, inst: "Instance" | None = None) -> str:
        return print_action(self.action, inst)

    def show(self, inst: "Instance" | None = None) -> str:
        return f"--{self.label(inst)}--> {print_agent(self.derivative, inst)}"


# ---------------------------------------------------------------- policies


@dataclass(frozen=True)
class ClosedSystem:
    """Inputs are only used inside communications."""


@dataclass(frozen=True)
class CandidateObjects:
    """Report inputs of exactly these objects (those matching the pattern)."""

    objects: tuple


@dataclass(frozen=True)
class NameInstantiation:
    """Report inputs whose pattern variables are instantiated with these names."""

    names: tuple


@dataclass(frozen=True)
class SymbolicOnly:
    """Report each input as an unlabelled schema."""


# ---------------------------------------------------------------- the engine


def prefix_subjects(agent: Agent) -> set:
    out: set = set()
    stack = [agent]
    while stack:
        p = stack.pop()
        if isinstance(p, (Output, Input)):
            out.add(p.subject)
            stack.append(p.cont)
        elif isinstance(p, (Res, Rep)):
            stack.append(p.body)
        elif isinstance(p, Par):
            stack.extend((p.left, p.right))
        elif isinstance(p, Case):
            stack.extend(b for _, b in p.branches)
    return out


def assertions_in(agent: Agent) -> list:
    out = []
    stack = [agent]
    while stack:
        p = stack.pop()
        if isinstance(p, Assert):
            out.append(p.assertion)
        elif isinstance(p, (Output, Input)):
            stack.append(p.cont)
        elif isinstance(p, (Res, Rep)):
            stack.append(p.body)
        elif isinstance(p, Par):
            stack.extend((p.left, p.right))
        elif isinstance(p, Case):
            stack.extend(b for _, b in p.branches)
    return out


def _first_occurrence_order(names: Iterable[Name], term: Any) -> tuple:
    order: list = []

    def walk(t):
        if isinstance(t, str):
            if t not in order:
                order.append(t)
        elif isinstance(t, Fn):
            for a in t.args:
                walk(a)
        else:
            for n in sorted(support(t)):
                if n not in order:
                    order.append(n)

    walk(term)
    wanted = set(names)
    return tuple(n for n in order if n in wanted)


class _Engine:
    def __init__(self, inst: "Instance", rep_bound: int, strict: bool, channels: set, supply: NameSupply):
        self.inst = inst
        self.rep_bound = rep_bound
        self.strict = strict
        self.channels = channels
        self.supply = supply
        self._frames: dict = {}

    def frame(self, agent: Agent) -> Frame:
        hit = self._frames.get(agent)
        if hit is None:
            hit = frame_of(agent, self.inst)
            self._frames[agent] = hit
        return hit

    def subjects_for(self, env: Any, subject: Any) -> list:
        inst = self.inst
        return [k for k in self.channels if inst.entails(env, inst.chan_eq(subject, k))]

    def moves(self, env: Any, p: Agent, depth: int) -> list[tuple]:
        inst = self.inst
        if isinstance(p, (Nil, Assert)):
            return []
        if isinstance(p, Output):
            return [("out", k, (), p.obj, p.cont) for k in self.subjects_for(env, p.subject)]
        if isinstance(p, Input):
            return [("in", k, p.binders, p.pattern, p.cont, frozenset()) for k in self.subjects_for(env, p.subject)]
        if isinstance(p, Case):
            out = []
            for cond, body in p.branches:
                if guarded(body) and inst.entails(env, cond):
                    out.extend(self.moves(env, body, depth))
            return out
        if isinstance(p, Res):
            return self._restrict(p.name, self.moves(env, p.body, depth))
        if isinstance(p, Par):
            return self._par(env, p, depth)
        if isinstance(p, Rep):
            if not guarded(p.body):
                return []
            if depth >= self.rep_bound:
                if self.strict:
                    raise DepthExceeded(self.rep_bound, "replication")
                return []
            def choose(old: Name) -> Name:
                return self.supply.like(old)

            copy = rename_binders(p.body, choose)
            self.channels.update(prefix_subjects(copy))
            return self.moves(env, Par(copy, p), depth + 1)
        raise TypeError(p)

    @staticmethod
    def _restrict(b: Name, moves: list) -> list:
        out = []
        for mv in moves:
            tag = mv[0]
            if tag == "tau":
                out.append(("tau", Res(b, mv[1])))
            elif tag == "out":
                _, k, bound, obj, deriv = mv
                if b in support(k):
                    continue
                if b in support(obj):
                    # Open
                    out.append(("out", k, _first_occurrence_order(set(bound) | {b}, obj), obj, deriv))
                else:
                    out.append(("out", k, bound, obj, Res(b, deriv)))
            else:
                _, k, xs, pat, deriv, blocked = mv
                if b in support(k):
                    continue
                out.append(("in", k, xs, pat, Res(b, deriv), blocked | {b}))
        return out

    def _par(self, env: Any, p: Par, depth: int) -> list:
        inst = self.inst
        left, right = p.left, p.right
        fl, fr = self.frame(left), self.frame(right)
        env_l = inst.compose(env, fr.assertion)
        env_r = inst.compose(env, fl.assertion)
        moves_l = self.moves(env_l, left, depth)
        moves_r = self.moves(env_r, right, depth)
        out = []
        out.extend(self._lift(moves_l, frozenset(fr.binders), lambda d: Par(d, right)))
        out.extend(self._lift(moves_r, frozenset(fl.binders), lambda d: Par(left, d)))
        outs_l = [m for m in moves_l if m[0] == "out"]
        ins_l = [m for m in moves_l if m[0] == "in"]
        outs_r = [m for m in moves_r if m[0] == "out"]
        ins_r = [m for m in moves_r if m[0] == "in"]
        if (outs_l and ins_r) or (ins_l and outs_r):
            both = inst.compose(inst.compose(env, fl.assertion), fr.assertion)
            for o, i in itertools.product(outs_l, ins_r):
                d = self._com(both, o, i)
                if d is not None:
                    bound, po, qi = d
                    out.append(("tau", restrict(bound, Par(po, qi))))
            for i, o in itertools.product(ins_l, outs_r):
                d = self._com(both, o, i)
                if d is not None:
                    bound, po, qi = d
                    out.append(("tau", restrict(bound, Par(qi, po))))
        return out

    def _com(self, env: Any, out_move: tuple, in_move: tuple):
        inst = self.inst
        _, k_out, bound, obj, p_deriv = out_move
        _, k_in, xs, pattern, q_deriv, blocked = in_move
        if not inst.entails(env, inst.chan_eq(k_out, k_in)):
            return None
        found = inst.match_pattern(xs, pattern, obj)
        if found is None or (support(obj) & blocked):
            return None
        return bound, p_deriv, substitute_agent(q_deriv, xs, found, inst)

    @staticmethod
    def _lift(moves: list, others: frozenset, wrap) -> list:
        out = []
        for mv in moves:
            tag = mv[0]
            if tag == "tau":
                out.append(("tau", wrap(mv[1])))
            elif tag == "out":
                _, k, bound, obj, deriv = mv
                if (support(k) | support(obj)) & others:
                    continue
                out.append(("out", k, bound, obj, wrap(deriv)))
            else:
                _, k, xs, pat, deriv, blocked = mv
                if support(k) & others:
                    continue
                out.append(("in", k, xs, pat, wrap(deriv), blocked | others))
        return out


def transitions(
    env: Any,
    agent: Agent,
    inst: "Instance",
    policy: Any = None,
    rep_bound: int = DEFAULT_REP_BOUND,
    extra_channels: Iterable[Any] = (),
    strict: bool = False,
) -> list[Transition]:
    """All derivable transitions of ``env |> agent``, restricted as the policy says.

    Action subjects range over the prefix subjects of the agent, the
    instance's channel candidates for the assertions involved, and
    ``extra_channels``.  Replication is unfolded at most ``rep_bound`` times
    along a derivation; with ``strict`` hitting the bound raises
    ``DepthExceeded``, otherwise those derivations are dropped.
    """
    policy = ClosedSystem() if policy is None else policy
    extra = tuple(extra_channels)
    avoid = set(support(env)) | set(support(extra))
    if isinstance(policy, CandidateObjects):
        avoid |= support(policy.objects)
    elif isinstance(policy, NameInstantiation):
        avoid |= set(policy.names)
    work = distinct_binders(agent, avoid)
    channels = set(extra) | prefix_subjects(work)
    channels |= inst.channel_candidates(env)
    for psi in assertions_in(work):
        channels |= inst.channel_candidates(psi)
    supply = NameSupply(avoid | all_names(work) | support(tuple(channels)))
    engine = _Engine(inst, rep_bound, strict, channels, supply)
    raw = engine.moves(env, work, 0)

    results: dict = {}
    for mv in raw:
        tag = mv[0]
        if tag == "tau":
            residuals = [Residual(TAU, mv[1])]
        elif tag == "out":
            _, k, bound, obj, deriv = mv
            residuals = [Residual(OutputAct(k, bound, obj), deriv)]
        else:
            residuals = _instantiate_input(mv, policy, inst)
        for r in residuals:
            key = r.canonical()
            if key not in results:
                results[key] = Transition(env, agent, r)
    return sorted(results.values(), key=lambda t: _order_key(t, inst))


def _instantiate_input(move: tuple, policy: Any, inst: "Instance") -> list[Residual]:
    _, k, xs, pattern, deriv, blocked = move
    if isinstance(policy, ClosedSystem):
        return []
    if isinstance(policy, SymbolicOnly):
        return [Residual(InputSchema(k, xs, pattern), deriv)]
    out = []
    if isinstance(policy, CandidateObjects):
        for obj in policy.objects:
            found = inst.match_pattern(xs, pattern, obj)
            if found is not None and not (support(obj) & blocked):
                out.append(Residual(InputAct(k, obj), substitute_agent(deriv, xs, found, inst)))
    elif isinstance(policy, NameInstantiation):
        for combo in itertools.product(policy.names, repeat=len(xs)):
            obj = inst.subst_term(pattern, xs, combo)
            if not (support(obj) & blocked):
                out.append(Residual(InputAct(k, obj), substitute_agent(deriv, xs, combo, inst)))
    else:
        raise TypeError(f"unknown input policy {policy!r}")
    return out


_KIND_ORDER = {"in": 0, "in?": 0, "out": 1, "tau": 2}


def _order_key(t: Transition, inst: "Instance") -> tuple:
    return (_KIND_ORDER[t.action.kind], t.label(inst), print_agent(t.derivative, inst))


# ---------------------------------------------------------------- traces


@dataclass
class Trace:
    start: Agent
    steps: list[Transition] = field(default_factory=list)
    quiescent: bool = False

    @property
    def final(self) -> Agent:
        return self.steps[-1].derivative if self.steps else self.start

    def show(self, inst: "Instance" | None = None) -> str:
        lines = [print_agent(self.start, inst)]
        lines += [t.show(inst) for t in self.steps]
        if self.quiescent:
            lines.append("(no further tau transitions)")
        return "\n".join(lines)


def run_trace(
    env: Any,
    agent: Agent,
    inst: "Instance",
    steps: int,
    policy: Any = None,
    scheduler: str = "first",
    seed: int = 0,
    rep_bound: int = DEFAULT_REP_BOUND,
) -> Trace:
    """Follow up to ``steps`` tau transitions chosen by the scheduler
    (``first`` in canonical order, or ``random`` with ``seed``)."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    rng = random.Random(seed)
    trace = Trace(agent)
    current = agent
    for _ in range(steps):
        taus = [t for t in transitions(env, current, inst, policy, rep_bound) if t.action.kind == "tau"]
        if not taus:
            trace.quiescent = True
            return trace
        pick = taus[0] if scheduler == "first" else rng.choice(taus)
        trace.steps.append(pick)
        current = pick.derivative
    if steps and not [t for t in transitions(env, current, inst, policy, rep_bound) if t.action.kind == "tau"]:
        trace.quiescent = True
    return trace


# ---------------------------------------------------------------- LTS


@dataclass
class LTS:
    env: Any
    states: list[Agent]
    edges: list[tuple[int, str, int]]
    truncated: bool
    frames: list[Frame]

    def to_json(self, inst: "Instance") -> str:
        return json.dumps(
            {
                "states": [
                    {"id": i, "agent": print_agent(s, inst), "frame": _show_frame(f, inst)}
                    for i, (s, f) in enumerate(zip(self.states, self.frames))
                ],
                "edges": [{"src": s, "label": l, "dst": d} for s, l, d in self.edges],
                "truncated": self.truncated,
            },
            indent=2,
        )

    def to_dot(self, inst: "Instance") -> str:
        lines = ["digraph lts {", "  rankdir=LR;"]
        for i, s in enumerate(self.states):
            text = print_agent(s, inst).replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  s{i} [label="{text}"{", peripheries=2" if i == 0 else ""}];')
        for s, l, d in self.edges:
            text = l.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  s{s} -> s{d} [label="{text}"];')
        if self.truncated:
            lines.append('  truncated [shape=note, label="truncated"];')
        lines.append("}")
        return "\n".join(lines)


def _show_frame(frame: Frame, inst: "Instance") -> str:
    body = inst.print_assertion(frame.assertion)
    return f"(new {','.join(frame.binders)}){body}" if frame.binders else body


def build_lts(
    env: Any,
    agent: Agent,
    inst: "Instance",
    max_states: int = 10_000,
    max_depth: int = 32,
    policy: Any = None,
    rep_bound: int = DEFAULT_REP_BOUND,
    normaliser=None,
) -> LTS:
    """Breadth-first exploration over alpha-canonical states.

    ``normaliser`` (optional) maps each derivative to a representative before
    deduplication, e.g. a structural normal form.
    """
    if max_states <= 0 or max_depth <= 0:
        raise ValueError("bounds must be positive")
    root = agent
    index = {root.canonical(): 0}
    states = [root]
    frames = [frame_of(root, inst)]
    edges: list[tuple[int, str, int]] = []
    truncated = False
    queue = deque([(root, 0)])
    while queue:
        state, depth = queue.popleft()
        src = index[state.canonical()]
        if depth >= max_depth:
            truncated = True
            continue
        for t in transitions(env, state, inst, policy, rep_bound):
            nxt = t.derivative if normaliser is None else normaliser(t.derivative)
            key = nxt.canonical()
            if key not in index:
                if len(states) >= max_states:
                    truncated = True
                    continue
                index[key] = len(states)
                states.append(nxt)
                frames.append(frame_of(nxt, inst))
                queue.append((nxt, depth + 1))
            edges.append((src, t.label(inst), index[key]))
    return LTS(env, states, edges, truncated, frames)


def follow_labels(
    env: Any,
    agent: Agent,
    inst: "Instance",
    labels: Sequence[str],
    policy: Any = None,
    rep_bound: int = DEFAULT_REP_BOUND,
    choose=None,
) -> list[Transition]:
    """Drive the agent along printed labels; ``choose`` picks among candidates
    with the wanted label (default: the first in canonical order)."""
    out = []
    current = agent
    for step, label in enumerate(labels, 1):
        options = [t for t in transitions(env, current, inst, policy, rep_bound) if t.label(inst) == label]
        if not options:
            from .errors import GoldenMismatch

            have = sorted({t.label(inst) for t in transitions(env, current, inst, policy, rep_bound)})
            raise GoldenMismatch(step, label, "available: " + ", ".join(have))
        pick = options[0] if choose is None else choose(options)
        out.append(pick)
        current = pick.derivative
    return out
