"""The pi-calculus and pi-F as psi instances, with reference semantics.

Pi concrete syntax (``|`` binds loosest, then ``+``)::

    agent := sum ("|" sum)*
    sum   := unary ("+" unary)*
    unary := "0" | "!" unary | "(new" names ")" unary | "[" a "=" b "]" unary
           | "(" agent ")" | a "!" b "." unary | a "?(" x ")." unary

Pi-F (monadic) concrete syntax::

    unary := "0" | "!" unary | "(new" names ")" unary | "<" x "=" y ">"
           | "(" agent ")" | a "?" datum "." unary | a "!" datum "." unary
    datum := "<" x ">" | "(new" names ")" datum

The reference pi LTS below is written against the pi AST only and shares no
code with the psi transition engine, so it can serve as an oracle.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .bisim import structural_normal_form
from .errors import ArityMismatch, DepthExceeded, NotPreNormalised, PsiSyntaxError
from .instance_api import ConformanceReport, LawResult
from .instances import fusion_instance, pi_instance
from .nominal import Name, NameSupply, fresh_like, fresh_names
from .semantics import NameInstantiation, InputAct, OutputAct, Residual, TAU, print_action, transitions
from .syntax import NIL, Agent, Assert, Case, Input, Nil, Output, Par, Rep, Res, print_agent
from .terms import Eq

# ---------------------------------------------------------------- pi AST


@dataclass(frozen=True)
class PiNil:
    pass


@dataclass(frozen=True)
class PiOut:
    subject: Name
    obj: Name
    cont: Any


@dataclass(frozen=True)
class PiIn:
    subject: Name
    binder: Name
    cont: Any


@dataclass(frozen=True)
class PiPar:
    left: Any
    right: Any


@dataclass(frozen=True)
class PiSum:
    left: Any
    right: Any


@dataclass(frozen=True)
class PiRep:
    body: Any


@dataclass(frozen=True)
class PiRes:
    name: Name
    body: Any


@dataclass(frozen=True)
class PiMatch:
    left: Name
    right: Name
    cont: Any


PI_NIL = PiNil()


def pi_free_names(p) -> frozenset:
    if isinstance(p, PiNil):
        return frozenset()
    if isinstance(p, PiOut):
        return frozenset((p.subject, p.obj)) | pi_free_names(p.cont)
    if isinstance(p, PiIn):
        return frozenset((p.subject,)) | (pi_free_names(p.cont) - {p.binder})
    if isinstance(p, (PiPar, PiSum)):
        return pi_free_names(p.left) | pi_free_names(p.right)
    if isinstance(p, PiRep):
        return pi_free_names(p.body)
    if isinstance(p, PiRes):
        return pi_free_names(p.body) - {p.name}
    if isinstance(p, PiMatch):
        return frozenset((p.left, p.right)) | pi_free_names(p.cont)
    raise TypeError(p)


def pi_all_names(p) -> frozenset:
    if isinstance(p, PiNil):
        return frozenset()
    if isinstance(p, PiOut):
        return frozenset((p.subject, p.obj)) | pi_all_names(p.cont)
    if isinstance(p, PiIn):
        return frozenset((p.subject, p.binder)) | pi_all_names(p.cont)
    if isinstance(p, (PiPar, PiSum)):
        return pi_all_names(p.left) | pi_all_names(p.right)
    if isinstance(p, PiRep):
        return pi_all_names(p.body)
    if isinstance(p, PiRes):
        return {p.name} | pi_all_names(p.body)
    if isinstance(p, PiMatch):
        return frozenset((p.left, p.right)) | pi_all_names(p.cont)
    raise TypeError(p)


def pi_subst(p, mapping: dict, supply: NameSupply | None = None):
    """Capture-avoiding simultaneous substitution of names for names."""
    if not mapping:
        return p
    supply = supply or NameSupply(pi_all_names(p) | set(mapping) | set(mapping.values()))
    m = lambda n: mapping.get(n, n)  # noqa: E731

    def binder(b, body):
        inner = {k: v for k, v in mapping.items() if k != b}
        if b in set(inner.values()) and any(k in pi_free_names(body) for k in inner):
            fresh = supply.like(b)
            inner[b] = fresh
            return fresh, inner
        return b, inner

    if isinstance(p, PiNil):
        return p
    if isinstance(p, PiOut):
        return PiOut(m(p.subject), m(p.obj), pi_subst(p.cont, mapping, supply))
    if isinstance(p, PiIn):
        b, inner = binder(p.binder, p.cont)
        return PiIn(m(p.subject), b, pi_subst(p.cont, inner, supply))
    if isinstance(p, PiPar):
        return PiPar(pi_subst(p.left, mapping, supply), pi_subst(p.right, mapping, supply))
    if isinstance(p, PiSum):
        return PiSum(pi_subst(p.left, mapping, supply), pi_subst(p.right, mapping, supply))
    if isinstance(p, PiRep):
        return PiRep(pi_subst(p.body, mapping, supply))
    if isinstance(p, PiRes):
        b, inner = binder(p.name, p.body)
        return PiRes(b, pi_subst(p.body, inner, supply))
    if isinstance(p, PiMatch):
        return PiMatch(m(p.left), m(p.right), pi_subst(p.cont, mapping, supply))
    raise TypeError(p)


def pi_rename_binders(p, supply: NameSupply):
    """Alpha-variant with every binder replaced by a fresh name from ``supply``."""

    def go(q, env):
        r = lambda n: env.get(n, n)  # noqa: E731
        if isinstance(q, PiNil):
            return q
        if isinstance(q, PiOut):
            return PiOut(r(q.subject), r(q.obj), go(q.cont, env))
        if isinstance(q, PiIn):
            b = supply.like(q.binder)
            return PiIn(r(q.subject), b, go(q.cont, {**env, q.binder: b}))
        if isinstance(q, PiPar):
            return PiPar(go(q.left, env), go(q.right, env))
        if isinstance(q, PiSum):
            return PiSum(go(q.left, env), go(q.right, env))
        if isinstance(q, PiRep):
            return PiRep(go(q.body, env))
        if isinstance(q, PiRes):
            b = supply.like(q.name)
            return PiRes(b, go(q.body, {**env, q.name: b}))
        if isinstance(q, PiMatch):
            return PiMatch(r(q.left), r(q.right), go(q.cont, env))
        raise TypeError(q)

    return go(p, {})


def pi_canonical(p):
    free = pi_free_names(p)
    counter = itertools.count()

    class _Seq(NameSupply):
        def like(self, name):
            while True:
                cand = f"_{next(counter)}"
                if cand not in free:
                    return cand

    return pi_rename_binders(p, _Seq())


# ---------------------------------------------------------------- pi syntax

_TOKEN = re.compile(r"\s*(\(new\b|[A-Za-z_][A-Za-z0-9_']*|\?\(|\S)")


def _tokens(text: str) -> list[str]:
    text = re.sub(r"#[^\n]*", "", text)
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        out.append(m.group(1))
        pos = m.end()
    return [t for t in out if t.strip()]


class _TokParser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self, k: int = 0) -> str | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def take(self) -> str:
        t = self.peek()
        if t is None:
            raise PsiSyntaxError("unexpected end of input")
        self.i += 1
        return t

    def expect(self, want: str) -> None:
        got = self.take()
        if got != want:
            raise PsiSyntaxError(f"expected {want!r}, found {got!r}", self.i)

    def name(self) -> str:
        t = self.take()
        if not re.match(r"^[A-Za-z_][A-Za-z0-9_']*$", t):
            raise PsiSyntaxError(f"name expected, found {t!r}", self.i)
        return t

    def names(self) -> list[str]:
        out = [self.name()]
        while self.peek() == ",":
            self.take()
            out.append(self.name())
        return out

    def done(self) -> None:
        if self.peek() is not None:
            raise PsiSyntaxError(f"unexpected {self.peek()!r}", self.i)


class _PiParser(_TokParser):
    def agent(self):
        left = self.sum()
        while self.peek() == "|":
            self.take()
            left = PiPar(left, self.sum())
        return left

    def sum(self):
        left = self.unary()
        while self.peek() == "+":
            self.take()
            left = PiSum(left, self.unary())
        return left

    def unary(self):
        t = self.peek()
        if t == "0":
            self.take()
            return PI_NIL
        if t == "!":
            self.take()
            return PiRep(self.unary())
        if t == "(new":
            self.take()
            names = self.names()
            self.expect(")")
            body = self.unary()
            for n in reversed(names):
                body = PiRes(n, body)
            return body
        if t == "[":
            self.take()
            a = self.name()
            self.expect("=")
            b = self.name()
            self.expect("]")
            return PiMatch(a, b, self.unary())
        if t == "(":
            self.take()
            inner = self.agent()
            self.expect(")")
            return inner
        subject = self.name()
        op = self.take()
        if op == "!":
            obj = self.name()
            self.expect(".")
            return PiOut(subject, obj, self.unary())
        if op in ("?(", "("):
            x = self.name()
            self.expect(")")
            self.expect(".")
            return PiIn(subject, x, self.unary())
        raise PsiSyntaxError(f"unexpected {op!r} after {subject!r}", self.i)


def parse_pi(text: str):
    p = _PiParser(text)
    out = p.agent()
    p.done()
    return out


def print_pi(p, ctx: str = "top") -> str:
    if isinstance(p, PiNil):
        return "0"
    if isinstance(p, PiOut):
        return f"{p.subject}!{p.obj}.{print_pi(p.cont, 'unary')}"
    if isinstance(p, PiIn):
        return f"{p.subject}?({p.binder}).{print_pi(p.cont, 'unary')}"
    if isinstance(p, PiMatch):
        return f"[{p.left}={p.right}]{print_pi(p.cont, 'unary')}"
    if isinstance(p, PiRep):
        return "!" + print_pi(p.body, "unary")
    if isinstance(p, PiRes):
        names, body = [p.name], p.body
        while isinstance(body, PiRes):
            names.append(body.name)
            body = body.body
        return f"(new {','.join(names)}){print_pi(body, 'unary')}"
    if isinstance(p, PiSum):
        text = f"{print_pi(p.left, 'sum')} + {print_pi(p.right, 'unary')}"
        return text if ctx in ("top", "par", "sum") else f"({text})"
    if isinstance(p, PiPar):
        text = f"{print_pi(p.left, 'par')} | {print_pi(p.right, 'sum')}"
        return text if ctx in ("top", "par") else f"({text})"
    raise TypeError(p)


# ---------------------------------------------------------------- the encoding


def encode_pi(p) -> Agent:
    """Translate a pi agent into the pi instance.

    Match becomes a one-branch case; a sum becomes a two-branch case on
    ``s=s`` under a restriction of a name ``s`` fresh for both summands.
    """
    avoid = set(pi_all_names(p))

    def go(q) -> Agent:
        if isinstance(q, PiNil):
            return NIL
        if isinstance(q, PiOut):
            return Output(q.subject, q.obj, go(q.cont))
        if isinstance(q, PiIn):
            return Input(q.subject, (q.binder,), q.binder, go(q.cont))
        if isinstance(q, PiMatch):
            return Case(((Eq.of(q.left, q.right), go(q.cont)),))
        if isinstance(q, PiPar):
            return Par(go(q.left), go(q.right))
        if isinstance(q, PiRep):
            return Rep(go(q.body))
        if isinstance(q, PiRes):
            return Res(q.name, go(q.body))
        if isinstance(q, PiSum):
            s = fresh_like("s", avoid | pi_free_names(q))
            left, right = go(q.left), go(q.right)
            return Res(s, Case(((Eq(s, s), left), (Eq(s, s), right))))
        raise TypeError(q)

    return go(p)


def random_pi_agent(
    rng: random.Random,
    depth: int = 3,
    names: Sequence[Name] = ("a", "b", "c"),
    replication: bool = True,
    width: int = 2,
):
    """A random pi agent with prefix nesting at most ``depth``."""
    bound_count = itertools.count()

    def prefix(d, scope):
        if rng.random() < 0.5:
            return PiOut(rng.choice(scope), rng.choice(scope), go(d - 1, scope))
        x = f"x{next(bound_count)}"
        return PiIn(rng.choice(scope), x, go(d - 1, scope + [x]))

    def go(d, scope):
        roll = rng.random()
        if d == 0 or roll < 0.08:
            return PI_NIL
        if roll < 0.55:
            return prefix(d, scope)
        if roll < 0.70:
            return PiPar(go(d - 1, scope), go(d - 1, scope))
        if roll < 0.80:
            return PiSum(prefix(d, scope), prefix(d, scope))
        if roll < 0.88:
            r = f"r{next(bound_count)}"
            return PiRes(r, prefix(d, scope + [r]))
        if roll < 0.94 or not replication:
            return PiMatch(rng.choice(scope), rng.choice(scope), prefix(d, scope))
        return PiRep(prefix(d, scope))

    return go(depth, list(names))


# ---------------------------------------------------------------- reference pi LTS


@dataclass(frozen=True)
class PiTransition:
    """``kind`` is ``out`` (free output), ``bout`` (bound output of ``obj``),
    ``in`` (early input of ``obj``) or ``tau``."""

    kind: str
    subject: Name | None
    obj: Name | None
    derivative: Any

    def show(self) -> str:
        if self.kind == "tau":
            label = "tau"
        elif self.kind == "out":
            label = f"{self.subject}!{self.obj}"
        elif self.kind == "bout":
            label = f"{self.subject}!(new {self.obj}){self.obj}"
        else:
            label = f"{self.subject}?{self.obj}"
        return f"--{label}--> {print_pi(self.derivative)}"


class _PiLTS:
    def __init__(self, supply: NameSupply, rep_bound: int, strict: bool):
        self.supply = supply
        self.rep_bound = rep_bound
        self.strict = strict

    def moves(self, p, depth: int) -> list[tuple]:
        # ("out", a, b, P') ("bout", a, b, P') ("in", a, x, P'[x free]) ("tau", P')
        if isinstance(p, PiNil):
            return []
        if isinstance(p, PiOut):
            return [("out", p.subject, p.obj, p.cont)]
        if isinstance(p, PiIn):
            return [("in", p.subject, p.binder, p.cont)]
        if isinstance(p, PiMatch):
            return self.moves(p.cont, depth) if p.left == p.right else []
        if isinstance(p, PiSum):
            return self.moves(p.left, depth) + self.moves(p.right, depth)
        if isinstance(p, PiRes):
            out = []
            r = p.name
            for mv in self.moves(p.body, depth):
                if mv[0] == "tau":
                    out.append(("tau", PiRes(r, mv[1])))
                elif mv[1] == r:
                    continue
                elif mv[0] == "out" and mv[2] == r:
                    out.append(("bout", mv[1], r, mv[3]))
                elif mv[0] == "bout":
                    out.append((mv[0], mv[1], mv[2], PiRes(r, mv[3])))
                else:
                    out.append((mv[0], mv[1], mv[2], PiRes(r, mv[3])))
            return out
        if isinstance(p, PiPar):
            left = self.moves(p.left, depth)
            right = self.moves(p.right, depth)
            out = []
            for mv in left:
                out.append(mv[:-1] + (PiPar(mv[-1], p.right),))
            for mv in right:
                out.append(mv[:-1] + (PiPar(p.left, mv[-1]),))
            for a, b in ((left, right), (right, left)):
                for o in a:
                    if o[0] not in ("out", "bout"):
                        continue
                    for i in b:
                        if i[0] != "in" or i[1] != o[1]:
                            continue
                        received = pi_subst(i[3], {i[2]: o[2]})
                        pair = PiPar(o[3], received) if a is left else PiPar(received, o[3])
                        out.append(("tau", PiRes(o[2], pair) if o[0] == "bout" else pair))
            return out
        if isinstance(p, PiRep):
            if depth >= self.rep_bound:
                if self.strict:
                    raise DepthExceeded(self.rep_bound, "replication")
                return []
            copy = pi_rename_binders(p.body, self.supply)
            return self.moves(PiPar(copy, p), depth + 1)
        raise TypeError(p)


def pi_reference_transitions(
    p,
    universe: Sequence[Name] | None = None,
    rep_bound: int = 8,
    strict: bool = False,
) -> list[PiTransition]:
    """Early pi transitions of ``p``; inputs receive each name of
    ``universe`` (default: the free names plus one fresh name)."""
    free = pi_free_names(p)
    if universe is None:
        universe = sorted(free) + list(fresh_names(1, pi_all_names(p), prefix="f"))
    supply = NameSupply(pi_all_names(p) | set(universe))
    work = pi_rename_binders(p, supply)
    out = []
    for mv in _PiLTS(supply, rep_bound, strict).moves(work, 0):
        if mv[0] == "tau":
            out.append(PiTransition("tau", None, None, mv[1]))
        elif mv[0] == "in":
            for v in universe:
                out.append(PiTransition("in", mv[1], v, pi_subst(mv[3], {mv[2]: v})))
        else:
            out.append(PiTransition(mv[0], mv[1], mv[2], mv[3]))
    return out


# ---------------------------------------------------------------- correspondence


def drop_vacuous_restrictions(agent: Agent) -> Agent:
    """Remove ``(new a)`` wherever ``a`` does not occur in its scope."""
    if isinstance(agent, (Nil, Assert)):
        return agent
    if isinstance(agent, Output):
        return Output(agent.subject, agent.obj, drop_vacuous_restrictions(agent.cont))
    if isinstance(agent, Input):
        return Input(agent.subject, agent.binders, agent.pattern, drop_vacuous_restrictions(agent.cont))
    if isinstance(agent, Case):
        return Case(tuple((c, drop_vacuous_restrictions(b)) for c, b in agent.branches))
    if isinstance(agent, Par):
        return Par(drop_vacuous_restrictions(agent.left), drop_vacuous_restrictions(agent.right))
    if isinstance(agent, Rep):
        return Rep(drop_vacuous_restrictions(agent.body))
    if isinstance(agent, Res):
        body = drop_vacuous_restrictions(agent.body)
        return Res(agent.name, body) if agent.name in body.free_names else body
    raise TypeError(agent)


def translate_transition(t: PiTransition) -> Residual:
    """The psi residual a pi transition should correspond to."""
    deriv = encode_pi(t.derivative)
    if t.kind == "tau":
        return Residual(TAU, deriv)
    if t.kind == "out":
        return Residual(OutputAct(t.subject, (), t.obj), deriv)
    if t.kind == "bout":
        return Residual(OutputAct(t.subject, (t.obj,), t.obj), deriv)
    return Residual(InputAct(t.subject, t.obj), deriv)


def _residual_key(r: Residual) -> Residual:
    return Residual(r.action, drop_vacuous_restrictions(r.derivative)).canonical()


def compare_pi_transitions(p, rep_bound: int = 2) -> tuple[set, set]:
    """(pi-only, psi-only) residual keys for one agent; both empty on success."""

    inst = pi_instance()
    universe = sorted(pi_free_names(p)) + list(fresh_names(1, pi_all_names(p), prefix="f"))
    ref = {_residual_key(translate_transition(t)) for t in pi_reference_transitions(p, universe, rep_bound)}
    got = {
        _residual_key(t.residual)
        for t in transitions(inst.unit, encode_pi(p), inst, NameInstantiation(tuple(universe)), rep_bound)
    }
    return ref - got, got - ref


def correspondence_check(corpus: Iterable[Any], rep_bound: int = 2) -> ConformanceReport:
    """Pi transitions and psi transitions of the encoding coincide, with
    derivatives compared up to alpha once vacuous restrictions (left by the
    sum encoding) are removed."""
    report = ConformanceReport("pi correspondence")
    result = LawResult("same transitions", True, 0)
    for p in corpus:
        result.trials += 1
        missing, extra = compare_pi_transitions(p, rep_bound)
        if missing or extra:
            result.passed = False
            if result.counterexample is None:
                result.counterexample = {
                    "agent": print_pi(p),
                    "only_pi": sorted(_show_residual(r) for r in missing),
                    "only_psi": sorted(_show_residual(r) for r in extra),
                }
    report.results.append(result)
    return report


def _show_residual(r: Residual) -> str:

    return f"{print_action(r.action)} -> {print_agent(r.derivative)}"


# ---------------------------------------------------------------- pi bisimilarity oracle


def pi_bisimilar_reference(p, q, max_states: int = 20_000) -> bool:
    """Early strong bisimilarity of two replication-free pi agents by
    partition refinement over their finite LTSs.

    Inputs at depth ``d`` receive the initial free names, the names extruded
    so far and one name ``f<d>``; the name extruded at depth ``d`` is
    ``w<d>``.  Related states always sit at the same depth, so these choices
    are shared by both sides.
    """
    base = sorted(pi_free_names(p) | pi_free_names(q))
    reserved = set(base) | pi_all_names(p) | pi_all_names(q)
    wnames = [fresh_like(f"w{i}", reserved) for i in range(64)]
    fnames = [fresh_like(f"f{i}", reserved | set(wnames)) for i in range(64)]
    states: dict = {}
    edges: dict = {}
    queue = []

    def node(agent, depth):
        key = (depth, pi_canonical(agent))
        if key not in states:
            if len(states) >= max_states:
                raise DepthExceeded(max_states, "state")
            states[key] = agent
            queue.append(key)
        return key

    roots = (node(p, 0), node(q, 0))
    while queue:
        key = queue.pop()
        depth, _ = key
        agent = states[key]
        universe = base + wnames[:depth] + [fnames[depth]]
        out = set()
        for t in pi_reference_transitions(agent, universe, rep_bound=1, strict=True):
            deriv = t.derivative
            obj = t.obj
            if t.kind == "bout":
                deriv = pi_subst(deriv, {t.obj: wnames[depth]})
                obj = wnames[depth]
            out.add(((t.kind, t.subject, obj), node(deriv, depth + 1)))
        edges[key] = out

    block = {k: k[0] for k in states}
    while True:
        sig = {k: (block[k], frozenset((lab, block[d]) for lab, d in edges[k])) for k in states}
        ids: dict = {}
        new = {k: ids.setdefault(sig[k], len(ids)) for k in states}
        if len(set(new.values())) == len(set(block.values())):
            block = new
            break
        block = new
    return block[roots[0]] == block[roots[1]]


# ---------------------------------------------------------------- pi-F


@dataclass(frozen=True)
class FNil:
    pass


@dataclass(frozen=True)
class FPrefix:
    """``a?<x>.P`` (input) or ``a!<x>.P`` (output); ``scoped`` lists names
    restricted between the prefix and its datum."""

    output: bool
    subject: Name
    scoped: tuple
    datum: Name
    cont: Any


@dataclass(frozen=True)
class FFusion:
    left: Name
    right: Name


@dataclass(frozen=True)
class FPar:
    left: Any
    right: Any


@dataclass(frozen=True)
class FRes:
    name: Name
    body: Any


@dataclass(frozen=True)
class FRep:
    body: Any


F_NIL = FNil()


def pif_free_names(p) -> frozenset:
    if isinstance(p, FNil):
        return frozenset()
    if isinstance(p, FPrefix):
        return frozenset((p.subject,)) | (({p.datum} | pif_free_names(p.cont)) - set(p.scoped))
    if isinstance(p, FFusion):
        return frozenset((p.left, p.right))
    if isinstance(p, FPar):
        return pif_free_names(p.left) | pif_free_names(p.right)
    if isinstance(p, FRes):
        return pif_free_names(p.body) - {p.name}
    if isinstance(p, FRep):
        return pif_free_names(p.body)
    raise TypeError(p)


def pif_all_names(p) -> frozenset:
    if isinstance(p, FNil):
        return frozenset()
    if isinstance(p, FPrefix):
        return frozenset((p.subject, p.datum, *p.scoped)) | pif_all_names(p.cont)
    if isinstance(p, FFusion):
        return frozenset((p.left, p.right))
    if isinstance(p, FPar):
        return pif_all_names(p.left) | pif_all_names(p.right)
    if isinstance(p, FRes):
        return {p.name} | pif_all_names(p.body)
    if isinstance(p, FRep):
        return pif_all_names(p.body)
    raise TypeError(p)


def _pif_rename(p, env: dict, supply: NameSupply | None):
    """Apply ``env`` to free names; with a supply, binders are renamed fresh."""
    r = lambda n: env.get(n, n)  # noqa: E731

    def bind(name, env):
        if supply is None:
            inner = dict(env)
            inner.pop(name, None)
            return name, inner
        new = supply.like(name)
        return new, {**env, name: new}

    if isinstance(p, FNil):
        return p
    if isinstance(p, FFusion):
        return FFusion(r(p.left), r(p.right))
    if isinstance(p, FPar):
        return FPar(_pif_rename(p.left, env, supply), _pif_rename(p.right, env, supply))
    if isinstance(p, FRep):
        return FRep(_pif_rename(p.body, env, supply))
    if isinstance(p, FRes):
        n, inner = bind(p.name, env)
        return FRes(n, _pif_rename(p.body, inner, supply))
    if isinstance(p, FPrefix):
        subject = r(p.subject)
        inner = env
        scoped = []
        for s in p.scoped:
            n, inner = bind(s, inner)
            scoped.append(n)
        return FPrefix(p.output, subject, tuple(scoped), inner.get(p.datum, p.datum), _pif_rename(p.cont, inner, supply))
    raise TypeError(p)


class _PiFParser(_TokParser):
    def agent(self):
        left = self.unary()
        while self.peek() == "|":
            self.take()
            left = FPar(left, self.unary())
        return left

    def unary(self):
        t = self.peek()
        if t == "0":
            self.take()
            return F_NIL
        if t == "!":
            self.take()
            return FRep(self.unary())
        if t == "(new":
            self.take()
            names = self.names()
            self.expect(")")
            body = self.unary()
            for n in reversed(names):
                body = FRes(n, body)
            return body
        if t == "<":
            self.take()
            x = self.name()
            self.expect("=")
            y = self.name()
            self.expect(">")
            return FFusion(x, y)
        if t == "(":
            self.take()
            inner = self.agent()
            self.expect(")")
            return inner
        subject = self.name()
        op = self.take()
        if op not in ("!", "?"):
            raise PsiSyntaxError(f"expected '!' or '?' after {subject!r}", self.i)
        if self.peek() == ".":
            self.take()
        scoped, datum = self.datum()
        self.expect(".")
        return FPrefix(op == "!", subject, tuple(scoped), datum, self.unary())

    def datum(self):
        scoped = []
        while self.peek() == "(new":
            self.take()
            scoped.extend(self.names())
            self.expect(")")
        self.expect("<")
        datum = [self.name()]
        while self.peek() == ",":
            self.take()
            datum.append(self.name())
        self.expect(">")
        if len(datum) != 1:
            raise ArityMismatch("only monadic pi-F datums are supported")
        return scoped, datum[0]


def parse_pif(text: str):
    p = _PiFParser(text)
    out = p.agent()
    p.done()
    return out


def print_pif(p, ctx: str = "top") -> str:
    if isinstance(p, FNil):
        return "0"
    if isinstance(p, FFusion):
        return f"<{p.left}={p.right}>"
    if isinstance(p, FPrefix):
        scope = f"(new {','.join(p.scoped)})" if p.scoped else ""
        dot = "." if p.scoped else ""
        return f"{p.subject}{'!' if p.output else '?'}{dot}{scope}<{p.datum}>.{print_pif(p.cont, 'unary')}"
    if isinstance(p, FRep):
        return "!" + print_pif(p.body, "unary")
    if isinstance(p, FRes):
        return f"(new {p.name}){print_pif(p.body, 'unary')}"
    if isinstance(p, FPar):
        text = f"{print_pif(p.left, 'par')} | {print_pif(p.right, 'unary')}"
        return text if ctx in ("top", "par") else f"({text})"
    raise TypeError(p)


def prenormalise_pif(p):
    """Move restrictions of datums from under prefixes to in front of them."""
    if isinstance(p, (FNil, FFusion)):
        return p
    if isinstance(p, FPar):
        return FPar(prenormalise_pif(p.left), prenormalise_pif(p.right))
    if isinstance(p, FRes):
        return FRes(p.name, prenormalise_pif(p.body))
    if isinstance(p, FRep):
        return FRep(prenormalise_pif(p.body))
    cont = prenormalise_pif(p.cont)
    if not p.scoped:
        return FPrefix(p.output, p.subject, (), p.datum, cont)
    supply = NameSupply(pif_all_names(p))
    env = {}
    names = []
    for s in p.scoped:
        n = supply.like(s) if s == p.subject else s
        env[s] = n
        names.append(n)
    out = FPrefix(p.output, p.subject, (), env.get(p.datum, p.datum), _pif_rename(cont, env, None))
    for n in reversed(names):
        out = FRes(n, out)
    return out


def encode_pif(p) -> Agent:
    """Translate a pre-normalised monadic pi-F agent into the fusion instance."""
    avoid = set(pif_all_names(p))

    def go(q) -> Agent:
        if isinstance(q, FNil):
            return NIL
        if isinstance(q, FFusion):
            return Assert(frozenset((Eq.of(q.left, q.right),)))
        if isinstance(q, FPar):
            return Par(go(q.left), go(q.right))
        if isinstance(q, FRes):
            return Res(q.name, go(q.body))
        if isinstance(q, FRep):
            return Rep(go(q.body))
        if q.scoped:
            raise NotPreNormalised(f"restricted datum under a prefix: {print_pif(q)}")
        if q.output:
            return Output(q.subject, q.datum, go(q.cont))
        c = fresh_like("c", avoid)
        avoid.add(c)
        return Input(q.subject, (c,), c, Par(Assert(frozenset((Eq.of(q.datum, c),))), go(q.cont)))

    return go(p)


# ---------------------------------------------------------------- pi-F reducer


@dataclass
class _Flat:
    binders: list
    fusions: list  # FFusion components
    prefixes: list  # FPrefix components
    reps: list  # FRep components

    def rebuild(self, extra=()) -> Any:
        comps = list(self.fusions) + list(self.prefixes) + list(self.reps) + list(extra)
        out = comps[0] if comps else F_NIL
        for c in comps[1:]:
            out = FPar(out, c)
        for b in reversed(self.binders):
            out = FRes(b, out)
        return out


def _flatten(p, supply: NameSupply) -> _Flat:
    """Structural normal form: restrictions extruded (binders made fresh),
    fusions floated to the top, components listed."""
    flat = _Flat([], [], [], [])

    def go(q, env):
        q = _pif_rename(q, env, None) if env else q
        if isinstance(q, FNil):
            return
        if isinstance(q, FFusion):
            flat.fusions.append(q)
        elif isinstance(q, FPrefix):
            flat.prefixes.append(q)
        elif isinstance(q, FRep):
            flat.reps.append(q)
        elif isinstance(q, FPar):
            go(q.left, {})
            go(q.right, {})
        elif isinstance(q, FRes):
            n = supply.like(q.name)
            flat.binders.append(n)
            go(q.body, {q.name: n})
        else:
            raise TypeError(q)

    go(p, {})
    return flat


@dataclass(frozen=True)
class PiFTransition:
    """``kind`` is ``out``, ``in`` or ``tau``; visible transitions carry the
    datum and the restricted names extruded with it."""

    kind: str
    subject: Name | None
    bound: tuple
    datum: Name | None
    derivative: Any


def _classes(fusions: list) -> dict:
    parent: dict = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for f in fusions:
        a, b = find(f.left), find(f.right)
        if a != b:
            parent[max(a, b)] = min(a, b)
    return {x: find(x) for x in set(parent) | {f.left for f in fusions} | {f.right for f in fusions}}


def pif_transitions(p, rep_bound: int = 2) -> list[PiFTransition]:
    """Transitions of a pi-F agent derived on its structural normal form.

    Labels may use any free name fused with the prefix subject; a replicated
    component contributes up to ``rep_bound`` fresh copies.
    """
    supply = NameSupply(pif_all_names(p))
    flat = _flatten(p, supply)
    copies = []
    for r in flat.reps:
        for _ in range(rep_bound):
            copies.append((r, _flatten(r.body, supply)))
    movers = [(pre, None) for pre in flat.prefixes]
    for r, cf in copies:
        movers.extend((pre, cf) for pre in cf.prefixes)
    fusions = list(flat.fusions)
    reps_fusions = [f for _, cf in copies for f in cf.fusions]
    classes = _classes(fusions + reps_fusions)
    same = lambda a, b: a == b or classes.get(a, a) == classes.get(b, b)  # noqa: E731
    free = pif_free_names(p)
    names = sorted(free | {f.left for f in fusions} | {f.right for f in fusions})

    def result(used: list, extra: list):
        prefixes = [pre for pre in flat.prefixes if not any(pre is u for u, _ in used)]
        binders = list(flat.binders)
        fus = list(flat.fusions)
        rest = []
        for cf in {id(cf): cf for _, cf in used if cf is not None}.values():
            binders += cf.binders
            fus += cf.fusions
            prefixes += [pre for pre in cf.prefixes if not any(pre is u for u, _ in used)]
            rest += cf.reps
        return _Flat(binders, fus, prefixes, flat.reps + rest).rebuild(extra)

    out = []
    for pre, cf in movers:
        if cf is not None and cf.fusions:
            continue  # a copy that changes the frame is only used in communication
        for a in names:
            if a in flat.binders or not same(pre.subject, a):
                continue
            deriv = result([(pre, cf)], [pre.cont])
            bound = tuple(b for b in flat.binders if b == pre.datum)
            if bound:
                deriv = _drop_binder(deriv, bound[0])
            out.append(PiFTransition("out" if pre.output else "in", a, bound, pre.datum, deriv))
    for (o, co), (i, ci) in itertools.permutations(movers, 2):
        if not o.output or i.output or not same(o.subject, i.subject):
            continue
        if co is not None and co is ci and o is i:
            continue
        deriv = result([(o, co), (i, ci)], [FFusion(i.datum, o.datum), o.cont, i.cont])
        out.append(PiFTransition("tau", None, (), None, deriv))
    return out


def _drop_binder(p, name):
    if isinstance(p, FRes):
        if p.name == name:
            return p.body
        return FRes(p.name, _drop_binder(p.body, name))
    return p


def pif_expected_residuals(t: PiFTransition, inputs: Sequence[Name]) -> list[Residual]:
    """The fusion-instance residuals a pi-F transition corresponds to."""
    deriv = encode_pif(prenormalise_pif(t.derivative))
    if t.kind == "tau":
        return [Residual(TAU, deriv)]
    if t.kind == "out":
        return [Residual(OutputAct(t.subject, t.bound, t.datum), deriv)]
    out = []
    for y in inputs:
        if y in t.bound:
            continue
        body = Par(Assert(frozenset((Eq.of(t.datum, y),))), deriv)
        for b in reversed(t.bound):
            body = Res(b, body)
        out.append(Residual(InputAct(t.subject, y), body))
    return out


def compare_pif(p, rep_bound: int = 2) -> tuple[set, set]:
    """Engine and reference residuals of a pi-F agent, both modulo structural normal form."""

    inst = fusion_instance()
    q = prenormalise_pif(p)
    universe = sorted(pif_free_names(q)) + list(fresh_names(1, pif_all_names(q), prefix="y"))

    def key(r: Residual) -> Residual:
        return Residual(r.action, structural_normal_form(r.derivative)).canonical()

    expected = set()
    for t in pif_transitions(q, rep_bound):
        expected |= {key(r) for r in pif_expected_residuals(t, universe)}
    got = {
        key(t.residual)
        for t in transitions(inst.unit, encode_pif(q), inst, NameInstantiation(tuple(universe)), rep_bound)
    }
    return expected - got, got - expected
