"""Agents: the AST, concrete syntax, well-formedness, substitution and frames.

Concrete syntax (``#`` starts a comment that runs to the end of the line)::

    agent  := unary ("|" unary)*
    unary  := "0" | "!" unary | "(new" names ")" unary | "(|" assertion "|)"
            | "(" agent ")" | "case" branch ("[]" branch)* | "case" "[]"
            | "tau" "." unary
            | term "!" term "." unary
            | term "?" "(" "\" names ")" term "." unary
    branch := condition ":" unary

Terms, conditions and assertions are scanned as bracket-balanced runs of
text and handed to the instance's parsers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Any, Callable, Iterable, Sequence

from .errors import ArityMismatch, IllFormed, PsiSyntaxError
from .frames import (
    Frame,
    frame_compose,
    frame_entails,
    frame_entails_all,
    frame_equivalent,
    frame_extend,
    unit_frame,
)
from .nominal import Name, Permutation, apply_permutation, fresh_like, substitute_value, support
from .terms import Fn, print_term

if TYPE_CHECKING:
    from .instance_api import Instance


# ---------------------------------------------------------------- the AST


class Agent:
    """Common behaviour.  Subclasses are frozen dataclasses."""

    __slots__ = ()

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return all(getattr(self, f) == getattr(other, f) for f in self.__dataclass_fields__)

    @cached_property
    def _hash(self) -> int:
        return hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))

    def __support__(self) -> frozenset:
        return self.free_names

    @cached_property
    def free_names(self) -> frozenset:
        return self._free()

    def _free(self) -> frozenset:
        raise NotImplementedError

    def canonical(self) -> "Agent":
        return self._canon

    @cached_property
    def _canon(self) -> "Agent":
        free = self.free_names
        counter = [0]

        def choose(_old: Name) -> Name:
            while True:
                cand = f"_{counter[0]}"
                counter[0] += 1
                if cand not in free:
                    return cand

        return rename_binders(self, choose)

    def __str__(self) -> str:
        return print_agent(self)


@dataclass(frozen=True, eq=False)
class Nil(Agent):
    def _free(self):
        return frozenset()

    def __permute__(self, perm):
        return self


@dataclass(frozen=True, eq=False)
class Output(Agent):
    subject: Any
    obj: Any
    cont: Agent

    def _free(self):
        return support(self.subject) | support(self.obj) | self.cont.free_names

    def __permute__(self, perm):
        return Output(apply_permutation(perm, self.subject), apply_permutation(perm, self.obj),
                      apply_permutation(perm, self.cont))


@dataclass(frozen=True, eq=False)
class Input(Agent):
    subject: Any
    binders: tuple
    pattern: Any
    cont: Agent

    def _free(self):
        inner = (support(self.pattern) | self.cont.free_names) - frozenset(self.binders)
        return support(self.subject) | inner

    def __permute__(self, perm):
        return Input(apply_permutation(perm, self.subject), tuple(perm(b) for b in self.binders),
                     apply_permutation(perm, self.pattern), apply_permutation(perm, self.cont))


@dataclass(frozen=True, eq=False)
class Case(Agent):
    branches: tuple  # of (condition, Agent)

    def _free(self):
        out: frozenset = frozenset()
        for cond, body in self.branches:
            out |= support(cond) | body.free_names
        return out

    def __permute__(self, perm):
        return Case(tuple((apply_permutation(perm, c), apply_permutation(perm, p)) for c, p in self.branches))


@dataclass(frozen=True, eq=False)
class Res(Agent):
    name: Name
    body: Agent

    def _free(self):
        return self.body.free_names - {self.name}

    def __permute__(self, perm):
        return Res(perm(self.name), apply_permutation(perm, self.body))


@dataclass(frozen=True, eq=False)
class Par(Agent):
    left: Agent
    right: Agent

    def _free(self):
        return self.left.free_names | self.right.free_names

    def __permute__(self, perm):
        return Par(apply_permutation(perm, self.left), apply_permutation(perm, self.right))


@dataclass(frozen=True, eq=False)
class Rep(Agent):
    body: Agent

    def _free(self):
        return self.body.free_names

    def __permute__(self, perm):
        return Rep(apply_permutation(perm, self.body))


@dataclass(frozen=True, eq=False)
class Assert(Agent):
    assertion: Any

    def _free(self):
        return support(self.assertion)

    def __permute__(self, perm):
        return Assert(apply_permutation(perm, self.assertion))


NIL = Nil()


def restrict(names: Iterable[Name], body: Agent) -> Agent:
    """``(new a1,...,an)body`` as nested restrictions, outermost first."""
    for n in reversed(tuple(names)):
        body = Res(n, body)
    return body


def parallel(*agents: Agent) -> Agent:
    """Left-nested parallel composition; ``0`` for no arguments."""
    if not agents:
        return NIL
    out = agents[0]
    for a in agents[1:]:
        out = Par(out, a)
    return out


def par_components(agent: Agent) -> list[Agent]:
    if isinstance(agent, Par):
        return par_components(agent.left) + par_components(agent.right)
    return [agent]


def count_nodes(agent: Agent) -> int:
    if isinstance(agent, (Output, Input)):
        return 1 + count_nodes(agent.cont)
    if isinstance(agent, (Res, Rep)):
        return 1 + count_nodes(agent.body)
    if isinstance(agent, Par):
        return 1 + count_nodes(agent.left) + count_nodes(agent.right)
    if isinstance(agent, Case):
        return 1 + sum(count_nodes(p) for _, p in agent.branches)
    return 1


def has_replication(agent: Agent) -> bool:
    if isinstance(agent, Rep):
        return True
    if isinstance(agent, (Output, Input)):
        return has_replication(agent.cont)
    if isinstance(agent, Res):
        return has_replication(agent.body)
    if isinstance(agent, Par):
        return has_replication(agent.left) or has_replication(agent.right)
    if isinstance(agent, Case):
        return any(has_replication(p) for _, p in agent.branches)
    return False


# ------------------------------------------------------- binder renaming


def rename_binders(agent: Agent, choose: Callable[[Name], Name]) -> Agent:
    """Rename every binding occurrence in traversal order using ``choose``.

    ``choose`` must return names that are fresh for the free names of
    ``agent`` and distinct from each other.
    """

    def leaf(value, env):
        return substitute_value(value, env) if env else value

    def go(p: Agent, env: dict) -> Agent:
        if isinstance(p, Nil):
            return p
        if isinstance(p, Output):
            return Output(leaf(p.subject, env), leaf(p.obj, env), go(p.cont, env))
        if isinstance(p, Input):
            inner = dict(env)
            new = []
            for b in p.binders:
                n = choose(b)
                inner[b] = n
                new.append(n)
            return Input(leaf(p.subject, env), tuple(new), leaf(p.pattern, inner), go(p.cont, inner))
        if isinstance(p, Case):
            return Case(tuple((leaf(c, env), go(b, env)) for c, b in p.branches))
        if isinstance(p, Res):
            n = choose(p.name)
            inner = dict(env)
            inner[p.name] = n
            return Res(n, go(p.body, inner))
        if isinstance(p, Par):
            return Par(go(p.left, env), go(p.right, env))
        if isinstance(p, Rep):
            return Rep(go(p.body, env))
        if isinstance(p, Assert):
            return Assert(leaf(p.assertion, env))
        raise TypeError(f"not an agent: {p!r}")

    return go(agent, {})


def distinct_binders(agent: Agent, avoid: Iterable[Name] = ()) -> Agent:
    """An alpha-variant whose binders are pairwise distinct and avoid ``avoid``
    and the free names; original names are kept where possible."""
    used = set(avoid) | set(agent.free_names)
    if _binders_ok(agent, set(used)):
        return agent

    def choose(old: Name) -> Name:
        n = fresh_like(old, used)
        used.add(n)
        return n

    return rename_binders(agent, choose)


def _binders_ok(agent: Agent, used: set) -> bool:
    """True if all binders are distinct and avoid ``used`` (which is updated)."""
    stack = [agent]
    while stack:
        p = stack.pop()
        if isinstance(p, (Output,)):
            stack.append(p.cont)
        elif isinstance(p, Input):
            for b in p.binders:
                if b in used:
                    return False
                used.add(b)
            stack.append(p.cont)
        elif isinstance(p, Res):
            if p.name in used:
                return False
            used.add(p.name)
            stack.append(p.body)
        elif isinstance(p, Par):
            stack.extend((p.left, p.right))
        elif isinstance(p, Rep):
            stack.append(p.body)
        elif isinstance(p, Case):
            stack.extend(b for _, b in p.branches)
    return True


def bound_names(agent: Agent) -> set:
    out: set = set()
    stack = [agent]
    while stack:
        p = stack.pop()
        if isinstance(p, Output):
            stack.append(p.cont)
        elif isinstance(p, Input):
            out.update(p.binders)
            stack.append(p.cont)
        elif isinstance(p, Res):
            out.add(p.name)
            stack.append(p.body)
        elif isinstance(p, Par):
            stack.extend((p.left, p.right))
        elif isinstance(p, Rep):
            stack.append(p.body)
        elif isinstance(p, Case):
            stack.extend(b for _, b in p.branches)
    return out


def all_names(agent: Agent) -> set:
    return set(agent.free_names) | bound_names(agent)


def alpha_equal(first: Agent, second: Agent) -> bool:
    return first.canonical() == second.canonical()


# ---------------------------------------------------------------- well-formedness


def guarded(agent: Agent) -> bool:
    """No assertion occurs outside an input or output prefix."""
    if isinstance(agent, Assert):
        return False
    if isinstance(agent, (Nil, Output, Input)):
        return True
    if isinstance(agent, Par):
        return guarded(agent.left) and guarded(agent.right)
    if isinstance(agent, (Res, Rep)):
        return guarded(agent.body)
    if isinstance(agent, Case):
        return all(guarded(p) for _, p in agent.branches)
    raise TypeError(agent)


def ill_formed_reason(agent: Agent) -> str | None:
    """Why ``agent`` is not well formed, or ``None`` when it is."""
    stack = [agent]
    while stack:
        p = stack.pop()
        if isinstance(p, Output):
            stack.append(p.cont)
        elif isinstance(p, Input):
            if len(set(p.binders)) != len(p.binders):
                return "duplicate pattern variable"
            missing = set(p.binders) - support(p.pattern)
            if missing:
                return f"pattern variable not in object: {', '.join(sorted(missing))}"
            stack.append(p.cont)
        elif isinstance(p, Case):
            for _, body in p.branches:
                if not guarded(body):
                    return "unguarded assertion in a case branch"
                stack.append(body)
        elif isinstance(p, Rep):
            if not guarded(p.body):
                return "unguarded assertion under replication"
            stack.append(p.body)
        elif isinstance(p, Res):
            stack.append(p.body)
        elif isinstance(p, Par):
            stack.extend((p.left, p.right))
    return None


def well_formed(agent: Agent) -> bool:
    return ill_formed_reason(agent) is None


# ---------------------------------------------------------------- substitution


def substitute_agent(agent: Agent, names: Sequence[Name], terms: Sequence[Any], inst: "Instance") -> Agent:
    """Capture-avoiding simultaneous substitution ``agent[names := terms]``."""
    names, terms = tuple(names), tuple(terms)
    if len(names) != len(terms):
        raise ArityMismatch(f"{len(names)} names but {len(terms)} terms")
    if len(set(names)) != len(names):
        raise ArityMismatch("substituted names must be distinct")
    mapping = {n: t for n, t in zip(names, terms) if n != t}
    if not mapping:
        return agent
    return _subst(agent, mapping, inst)


def _subst(p: Agent, mapping: dict, inst: "Instance") -> Agent:
    mapping = {n: t for n, t in mapping.items() if n in p.free_names}
    if not mapping:
        return p
    ks, vs = tuple(mapping), tuple(mapping.values())
    if isinstance(p, Output):
        return Output(inst.subst_term(p.subject, ks, vs), inst.subst_term(p.obj, ks, vs), _subst(p.cont, mapping, inst))
    if isinstance(p, Case):
        return Case(tuple((inst.subst_cond(c, ks, vs), _subst(b, mapping, inst)) for c, b in p.branches))
    if isinstance(p, Par):
        return Par(_subst(p.left, mapping, inst), _subst(p.right, mapping, inst))
    if isinstance(p, Rep):
        return Rep(_subst(p.body, mapping, inst))
    if isinstance(p, Assert):
        return Assert(inst.subst_assertion(p.assertion, ks, vs))
    incoming = support(vs) | frozenset(ks)
    if isinstance(p, Res):
        name, body = p.name, p.body
        if name in incoming:
            fresh = fresh_like(name, set(incoming) | body.free_names | {name})
            body = apply_permutation(Permutation.swap(name, fresh), body)
            name = fresh
        return Res(name, _subst(body, mapping, inst))
    if isinstance(p, Input):
        subject = inst.subst_term(p.subject, ks, vs)
        binders, pattern, cont = list(p.binders), p.pattern, p.cont
        taken = set(incoming) | support(pattern) | cont.free_names | set(binders)
        for i, b in enumerate(binders):
            if b in incoming:
                fresh = fresh_like(b, taken)
                taken.add(fresh)
                perm = Permutation.swap(b, fresh)
                pattern = apply_permutation(perm, pattern)
                cont = apply_permutation(perm, cont)
                binders[i] = fresh
        inner = {n: t for n, t in mapping.items() if n not in binders}
        if inner:
            iks, ivs = tuple(inner), tuple(inner.values())
            pattern = inst.subst_term(pattern, iks, ivs)
            cont = _subst(cont, inner, inst)
        return Input(subject, tuple(binders), pattern, cont)
    raise TypeError(p)


# ---------------------------------------------------------------- frames


def frame_of(agent: Agent, inst: "Instance") -> Frame:
    """The frame ``F(P)``: top-level assertions with the restrictions above them."""
    if isinstance(agent, Assert):
        return Frame((), agent.assertion)
    if isinstance(agent, Par):
        return frame_compose(inst, frame_of(agent.left, inst), frame_of(agent.right, inst))
    if isinstance(agent, Res):
        inner = frame_of(agent.body, inst).renamed_apart({agent.name})
        return Frame((agent.name,) + inner.binders, inner.assertion)
    return unit_frame(inst)


# ---------------------------------------------------------------- macros


def tau_prefix(body: Agent, inst: "Instance" | None = None) -> Agent:
    """``tau.P`` encoded as ``(new t)(t!t.0 | t?(\\x)x.P)`` with ``t, x`` fresh for ``P``."""
    avoid = set(body.free_names)
    t = fresh_like("t", avoid)
    x = fresh_like("x", avoid | {t})
    return Res(t, Par(Output(t, t, NIL), Input(t, (x,), x, body)))


# ---------------------------------------------------------------- printing


def print_agent(agent: Agent, inst: "Instance" | None = None) -> str:
    return _print(agent, inst, "top")


def _show_term(t, inst):
    return inst.print_term(t) if inst is not None else print_term(t)


def _show_cond(c, inst):
    return inst.print_condition(c) if inst is not None else str(c)


def _show_assertion(a, inst):
    if inst is not None:
        return inst.print_assertion(a)
    if isinstance(a, frozenset):
        if not a:
            return "{}"
        return "{" + ", ".join(sorted(_show_term(x, None) if isinstance(x, str) else str(x) for x in a)) + "}"
    return str(a)


def _print(p: Agent, inst, ctx: str) -> str:
    """``ctx`` is ``top`` (anything goes), ``par`` (left operand of ``|``) or ``unary``."""
    if isinstance(p, Nil):
        return "0"
    if isinstance(p, Output):
        return f"{_show_term(p.subject, inst)}!{_show_term(p.obj, inst)}.{_print(p.cont, inst, 'unary')}"
    if isinstance(p, Input):
        return (f"{_show_term(p.subject, inst)}?(\\{','.join(p.binders)})"
                f"{_show_term(p.pattern, inst)}.{_print(p.cont, inst, 'unary')}")
    if isinstance(p, Case):
        if not p.branches:
            text = "case []"
        else:
            text = "case " + " [] ".join(
                f"{_show_cond(c, inst)} : {_print(b, inst, 'unary')}" for c, b in p.branches
            )
        return text if ctx in ("top", "par") else f"({text})"
    if isinstance(p, Res):
        names = [p.name]
        body = p.body
        while isinstance(body, Res):
            names.append(body.name)
            body = body.body
        return f"(new {','.join(names)}){_print(body, inst, 'unary')}"
    if isinstance(p, Par):
        text = f"{_print(p.left, inst, 'par')} | {_print(p.right, inst, 'right')}"
        return text if ctx in ("top", "par") else f"({text})"
    if isinstance(p, Rep):
        return f"!{_print(p.body, inst, 'unary')}"
    if isinstance(p, Assert):
        return f"(|{_show_assertion(p.assertion, inst)}|)"
    raise TypeError(p)


# ---------------------------------------------------------------- parsing

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_OPEN = "({<"
_CLOSE = ")}>"


def _has_top_level(text: str, chars: str) -> bool:
    depth = 0
    i = 0
    while i < len(text):
        if text.startswith("<->", i):
            i += 3
            continue
        ch = text[i]
        if ch in _OPEN:
            depth += 1
        elif ch in _CLOSE:
            depth -= 1
        elif depth == 0 and ch in chars:
            return True
        i += 1
    return False


def strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


class _Parser:
    def __init__(self, text: str, inst: "Instance"):
        self.text = strip_comments(text)
        self.pos = 0
        self.inst = inst

    # -- lexical helpers
    def ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.ws()
        return self.text.startswith(s, self.pos)

    def keyword(self, word: str) -> bool:
        self.ws()
        if not self.text.startswith(word, self.pos):
            return False
        end = self.pos + len(word)
        return end >= len(self.text) or not (self.text[end].isalnum() or self.text[end] in "_'")

    def expect(self, s: str) -> None:
        if not self.peek(s):
            found = self.text[self.pos:self.pos + 10] or "end of input"
            raise PsiSyntaxError(f"expected {s!r}, found {found!r}", self.pos)
        self.pos += len(s)

    def error(self, msg: str) -> PsiSyntaxError:
        return PsiSyntaxError(msg, self.pos)

    def names(self, close: str = ")") -> list[Name]:
        out = []
        self.ws()
        if self.peek(close):
            return out
        while True:
            self.ws()
            m = _IDENT.match(self.text, self.pos)
            if not m:
                raise self.error("name expected")
            out.append(m.group(0))
            self.pos = m.end()
            if self.peek(","):
                self.pos += 1
                continue
            return out

    def fragment(self, stops: Sequence[str]) -> str:
        """Scan a bracket-balanced run up to one of ``stops`` at depth 0."""
        self.ws()
        start, depth = self.pos, 0
        t = self.text
        while self.pos < len(t):
            if t.startswith("<->", self.pos):
                self.pos += 3
                continue
            if depth == 0 and any(t.startswith(s, self.pos) for s in stops):
                frag = t[start:self.pos].strip()
                if not frag:
                    raise self.error("empty term or condition")
                return frag
            ch = t[self.pos]
            if ch in _OPEN:
                depth += 1
            elif ch in _CLOSE:
                depth -= 1
                if depth < 0:
                    break
            self.pos += 1
        raise self.error(f"expected one of {list(stops)} after {t[start:self.pos]!r}")

    def leaf(self, parse: Callable[[str], Any], text: str, at: int) -> Any:
        try:
            return parse(text)
        except PsiSyntaxError as exc:
            raise PsiSyntaxError(f"{exc} in {text!r}", at) from None

    # -- grammar
    def agent(self) -> Agent:
        left = self.unary()
        while True:
            self.ws()
            if self.peek("|") and not self.peek("|)"):
                self.pos += 1
                left = Par(left, self.unary())
            else:
                return left

    def unary(self) -> Agent:
        self.ws()
        t, i = self.text, self.pos
        if i >= len(t):
            raise self.error("agent expected")
        if t[i] == "0" and (i + 1 >= len(t) or not (t[i + 1].isalnum() or t[i + 1] in "_'")):
            self.pos += 1
            return NIL
        if t[i] == "!":
            self.pos += 1
            return Rep(self.unary())
        if t.startswith("(new", i) and i + 4 < len(t) and not (t[i + 4].isalnum() or t[i + 4] in "_'"):
            self.pos += 4
            names = self.names()
            if not names:
                raise self.error("restriction needs at least one name")
            self.expect(")")
            return restrict(names, self.unary())
        if t.startswith("(|", i):
            self.pos += 2
            at = self.pos
            frag = self._assertion_text()
            return Assert(self.leaf(self.inst.parse_assertion, frag, at))
        if t[i] == "(":
            self.pos += 1
            inner = self.agent()
            self.expect(")")
            return inner
        if self.keyword("case"):
            self.pos += 4
            if self.peek("[]"):
                self.pos += 2
                return Case(())
            branches = [self.branch()]
            while self.peek("[]"):
                self.pos += 2
                branches.append(self.branch())
            return Case(tuple(branches))
        if self.keyword("tau"):
            # the encoding needs a fresh name to be a channel on its own
            if not self.inst.entails(self.inst.unit, self.inst.chan_eq("t", "t")):
                raise self.error(f"tau prefix is not available in instance {self.inst.name}")
            self.pos += 3
            self.expect(".")
            return tau_prefix(self.unary(), self.inst)
        return self.prefix()

    def _assertion_text(self) -> str:
        t = self.text
        start, depth = self.pos, 0
        while self.pos < len(t):
            if depth == 0 and t.startswith("|)", self.pos):
                frag = t[start:self.pos].strip()
                self.pos += 2
                return frag
            if t.startswith("<->", self.pos):
                self.pos += 3
                continue
            ch = t[self.pos]
            if ch in _OPEN:
                depth += 1
            elif ch in _CLOSE:
                depth -= 1
            self.pos += 1
        raise self.error("unterminated assertion, expected '|)'")

    def branch(self) -> tuple:
        at = self.pos
        frag = self.fragment([":"])
        cond = self.leaf(self.inst.parse_condition, frag, at)
        self.expect(":")
        return cond, self.unary()

    def prefix(self) -> Agent:
        at = self.pos
        subject_text = self.fragment(["!", "?"])
        subject = self.leaf(self.inst.parse_term, subject_text, at)
        if self.text[self.pos] == "!":
            self.pos += 1
            at = self.pos
            obj = self.leaf(self.inst.parse_term, self.fragment(["."]), at)
            self.expect(".")
            return Output(subject, obj, self.unary())
        self.pos += 1
        self.expect("(")
        self.expect("\\")
        binders = self.names()
        self.expect(")")
        at = self.pos
        text = self._explicit_pattern()
        if text is None:
            # implicit pattern: the variable itself, or a tuple of them
            if len(binders) == 1:
                pattern: Any = binders[0]
            else:
                pattern = Fn(f"t{len(binders)}", tuple(binders))
            if self.peek("."):
                self.pos += 1
            return Input(subject, tuple(binders), pattern, self.unary())
        pattern = self.leaf(self.inst.parse_term, text, at)
        self.expect(".")
        return Input(subject, tuple(binders), pattern, self.unary())

    def _explicit_pattern(self) -> str | None:
        """The pattern text, or ``None`` (position unchanged) when it is omitted."""
        start = self.pos
        self.ws()
        if self.pos >= len(self.text) or self.text[self.pos] in "(!.":
            self.pos = start
            return None
        try:
            text = self.fragment(["."])
        except PsiSyntaxError:
            self.pos = start
            return None
        if _has_top_level(text, "!?") or not _IDENT.match(text) and not text.startswith("<"):
            self.pos = start
            return None
        return text


def parse_agent(text: str, inst: "Instance", check: bool = True) -> Agent:
    """Parse concrete syntax.  With ``check`` an ill-formed agent raises ``IllFormed``."""
    parser = _Parser(text, inst)
    agent = parser.agent()
    parser.ws()
    if parser.pos != len(parser.text):
        raise parser.error(f"unexpected input {parser.text[parser.pos:parser.pos + 10]!r}")
    if check:
        reason = ill_formed_reason(agent)
        if reason:
            raise IllFormed(reason)
    return agent


__all__ = [
    "Agent", "Nil", "Output", "Input", "Case", "Res", "Par", "Rep", "Assert", "NIL",
    "restrict", "parallel", "par_components", "count_nodes", "has_replication",
    "rename_binders", "distinct_binders", "bound_names", "all_names", "alpha_equal",
    "guarded", "well_formed", "ill_formed_reason", "substitute_agent",
    "frame_of", "Frame", "frame_compose", "frame_extend", "frame_entails", "frame_entails_all",
    "frame_equivalent", "unit_frame", "tau_prefix", "print_agent", "parse_agent", "strip_comments",
]
